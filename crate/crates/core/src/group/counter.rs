use std::cell::Cell;

thread_local! {
    static PAIRINGS: Cell<u64> = const { Cell::new(0) };
}

pub(crate) fn add(n: u64) {
    PAIRINGS.with(|c| c.set(c.get() + n));
}

/// Base pairings executed on the current thread since the last reset.
pub fn pairing_count() -> u64 {
    PAIRINGS.with(Cell::get)
}

pub fn reset_pairing_count() {
    PAIRINGS.with(|c| c.set(0));
}
