use pso_bench::stress;
use pso_core::fitness;
use pso_core::{PsoParams, RngKey};

#[test]
fn appended_slots_are_unique() {
    assert_eq!(stress::append_uniqueness(10_000, 4), 0);
}

#[test]
fn appended_slots_are_unique_with_one_worker_per_entry() {
    assert_eq!(stress::append_uniqueness(200, 64), 0);
}

#[test]
fn spin_lock_excludes() {
    let r = stress::lock_counter(8, 10_000);
    assert_eq!(r.count, r.expected);
    assert_eq!(r.overlaps, 0);
    assert_eq!(r.final_word, 0);
}

#[test]
fn barrier_separates_phases() {
    let (violations, checked) = stress::barrier_litmus(4, 8, 2_500).unwrap();
    assert_eq!(violations, 0);
    assert!(checked >= 10_000);
    assert_eq!(stress::raw_barrier(6, 10_000), 0);
}

#[test]
fn queue_lock_survives_perturbation() {
    let f = fitness::lookup("cubic").unwrap();
    let p = PsoParams::builder()
        .particles(1024)
        .dims(1)
        .group_size(8)
        .iterations(30)
        .build()
        .unwrap();
    assert_eq!(p.groups(), 128);
    assert_eq!(stress::perturbed_queue_lock(&p, &f, RngKey::new(3), 10, 4).unwrap(), 0);
}

#[test]
fn queue_lock_ties_survive_perturbation() {
    // Velocities pinned at the upper bound put every particle on the same
    // corner after one step, so all of them tie.
    let f = fitness::lookup("cubic").unwrap();
    let p = PsoParams::builder()
        .particles(1024)
        .dims(2)
        .group_size(8)
        .velocity_bounds(200.0, 200.0)
        .iterations(10)
        .build()
        .unwrap();
    assert_eq!(stress::perturbed_queue_lock(&p, &f, RngKey::new(4), 10, 4).unwrap(), 0);
}
