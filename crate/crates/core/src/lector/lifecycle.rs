use super::pack::PackState;
use super::LectorError;

/// The only legal moves: draft -> under_review -> accepted | rejected.
pub fn is_legal_transition(from: PackState, to: PackState) -> bool {
    use PackState::*;
    matches!(
        (from, to),
        (Draft, UnderReview) | (UnderReview, Accepted) | (UnderReview, Rejected)
    )
}

pub fn check_transition(from: PackState, to: PackState) -> Result<(), LectorError> {
    if is_legal_transition(from, to) {
        Ok(())
    } else {
        Err(LectorError::IllegalTransition { from, to })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_three_of_sixteen_pairs_are_legal() {
        let legal: Vec<_> = PackState::ALL
            .iter()
            .flat_map(|&a| PackState::ALL.iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| is_legal_transition(a, b))
            .collect();
        assert_eq!(
            legal,
            [
                (PackState::Draft, PackState::UnderReview),
                (PackState::UnderReview, PackState::Accepted),
                (PackState::UnderReview, PackState::Rejected),
            ]
        );
        assert!(check_transition(PackState::Rejected, PackState::Accepted).is_err());
    }
}
