use super::{check_len, ClassicalOracle, OracleError};
use crate::bits::Bits;
use crate::qsim::{PureState, Register};
use crate::rng::SeededRng;

/// One classical-accessible query by a quantum caller.
///
/// The query register is measured in the computational basis, giving `x` with
/// probability `p_x`; the state collapses onto that branch and `O(x)` is
/// XORed into the answer register.
pub fn classical_query<O: ClassicalOracle + ?Sized>(
    state: &PureState,
    query: Register,
    answer: Register,
    oracle: &mut O,
    rng: &mut SeededRng,
) -> Result<(PureState, Bits), OracleError> {
    state.check_register(query)?;
    state.check_register(answer)?;
    if query.overlaps(&answer) {
        return Err(OracleError::OverlappingRegisters);
    }
    if query.len as u32 != oracle.in_len() {
        return Err(OracleError::LengthMismatch {
            expected: oracle.in_len(),
            found: query.len as u32,
        });
    }
    if answer.len as u32 != oracle.out_len() {
        return Err(OracleError::LengthMismatch {
            expected: oracle.out_len(),
            found: answer.len as u32,
        });
    }
    let (x, collapsed) = state.measure_register(query, rng)?;
    let x = Bits::new(x as u64, query.len as u32)?;
    let y = oracle.query(&x)?;
    check_len(&y, answer.len as u32)?;
    let n = state.num_qubits();
    let amps = collapsed.amplitudes();
    let mut out = amps.to_vec();
    for (i, a) in amps.iter().enumerate() {
        out[answer.xor_into(i, y.value() as usize, n)] = *a;
    }
    Ok((PureState::from_amplitudes(out)?, x))
}
