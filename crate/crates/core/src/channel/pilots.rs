use crate::scenario::PilotPolicy;

/// Which pilot each user sends, and who else shares it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PilotAssignment {
    tau_p: usize,
    pilot_of: Vec<usize>,
    /// Users on each pilot index, ascending.
    sharers: Vec<Vec<usize>>,
}

impl PilotAssignment {
    pub fn new(k: usize, tau_p: usize, policy: PilotPolicy) -> Self {
        assert!(k >= 1 && tau_p >= 1, "need K >= 1 and tau_p >= 1");
        let pilot_of: Vec<usize> = match policy {
            PilotPolicy::Modulo => (0..k).map(|u| u % tau_p).collect(),
        };
        let mut sharers = vec![Vec::new(); tau_p];
        for (user, &p) in pilot_of.iter().enumerate() {
            sharers[p].push(user);
        }
        PilotAssignment {
            tau_p,
            pilot_of,
            sharers,
        }
    }

    pub fn users(&self) -> usize {
        self.pilot_of.len()
    }

    pub fn tau_p(&self) -> usize {
        self.tau_p
    }

    pub fn pilot_of(&self, user: usize) -> usize {
        self.pilot_of[user]
    }

    /// `P_k`: every user sharing `user`'s pilot, `user` included.
    pub fn cohort(&self, user: usize) -> &[usize] {
        &self.sharers[self.pilot_of[user]]
    }

    /// Users on pilot `pilot` (possibly empty).
    pub fn users_on(&self, pilot: usize) -> &[usize] {
        &self.sharers[pilot]
    }

    /// Pilot indices that at least one user sends.
    pub fn used_pilots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.tau_p).filter(|&p| !self.sharers[p].is_empty())
    }
}

/// `assign_pilots` with the default policy.
pub fn assign_pilots(k: usize, tau_p: usize) -> PilotAssignment {
    PilotAssignment::new(k, tau_p, PilotPolicy::Modulo)
}
