use fairdiv_core::fairness::{check_mms, mms_thresholds};
use fairdiv_core::mms::{
    find_valid_reduction, mimic_instance, solve_mms, solve_three_agent, to_sop, MmsMethod,
    MmsVerdict, ReductionStep,
};
use fairdiv_core::model::{agent_flags, Instance};
use fairdiv_core::rational::int;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_instance(rng: &mut ChaCha8Rng, n: usize, m: usize, lo: i64, hi: i64) -> Instance {
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|_| (0..m).map(|_| rng.gen_range(lo..=hi)).collect())
        .collect();
    Instance::from_ints(&rows).unwrap()
}

/// Brute-force validity: removed agents meet their thresholds on the step's
/// instance and no surviving agent's threshold drops.
fn step_is_valid(step: &ReductionStep) -> bool {
    let before = mms_thresholds(&step.instance).unwrap();
    for (agent, ids) in &step.granted {
        let r = step.local(*agent).unwrap();
        let items: Vec<usize> = ids
            .iter()
            .map(|id| step.instance.item_index(id).unwrap())
            .collect();
        if step.instance.utility_of(r, &items) < before[r] {
            return false;
        }
    }
    let (rows, _) = step.survivors();
    if rows.is_empty() {
        return true;
    }
    let after = mms_thresholds(&step.reduced_instance()).unwrap();
    rows.iter().zip(&after).all(|(&r, t)| *t >= before[r])
}

fn covered(inst: &Instance) -> bool {
    let t = mms_thresholds(inst).unwrap();
    inst.m() <= inst.n + 5
        && (inst.n <= 3
            || t.iter().any(|x| !x.is_negative())
            || (0..inst.n).all(|i| agent_flags(inst, i).chores))
}

#[test]
fn example_thresholds_and_solution() {
    let inst = Instance::from_ints(&[[1, 2, 3, 4, 5, 6], [1, 10, 6, 0, 0, 0], [10, 1, 1, 1, 1, 1]])
        .unwrap();
    let out = solve_mms(&inst).unwrap();
    assert_eq!(out.thresholds, vec![int(7), int(1), int(2)]);
    assert_eq!(out.verdict, MmsVerdict::Found);
    assert!(
        check_mms(&inst, out.allocation.as_ref().unwrap())
            .unwrap()
            .holds
    );
}

#[test]
fn two_agents_always_found() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let m = rng.gen_range(1..=12);
        let inst = random_instance(&mut rng, 2, m, -5, 5);
        let out = solve_mms(&inst).unwrap();
        assert_eq!(out.verdict, MmsVerdict::Found);
        assert_eq!(out.method, MmsMethod::Constructive);
        assert!(
            check_mms(&inst, out.allocation.as_ref().unwrap())
                .unwrap()
                .holds
        );
    }
}

#[test]
fn three_agents_need_no_fallback() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..150 {
        let m = rng.gen_range(1..=8);
        let inst = random_instance(&mut rng, 3, m, -5, 5);
        let a = solve_three_agent(&inst).unwrap().unwrap();
        assert!(check_mms(&inst, &a).unwrap().holds);
        let out = solve_mms(&inst).unwrap();
        assert_eq!(out.method, MmsMethod::Constructive, "{:?}", inst.utilities);
    }
}

#[test]
fn covered_instances_are_solved_with_valid_steps() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut done = 0;
    while done < 400 {
        let n = rng.gen_range(4..=5);
        let m = rng.gen_range(n..=n + 5);
        let (lo, hi) = if rng.gen_bool(0.3) { (-5, 0) } else { (-2, 5) };
        let inst = random_instance(&mut rng, n, m, lo, hi);
        if !covered(&inst) {
            continue;
        }
        done += 1;
        let out = solve_mms(&inst).unwrap();
        assert_eq!(out.verdict, MmsVerdict::Found);
        assert_eq!(out.method, MmsMethod::Constructive, "{:?}", inst.utilities);
        assert!(out.trail.iter().all(step_is_valid));
    }
}

#[test]
fn reduction_on_uniform_chores_is_valid() {
    let inst = Instance::from_ints(&[[-1; 9]; 4]).unwrap();
    let step = find_valid_reduction(&inst).unwrap().unwrap();
    assert!(step_is_valid(&step));
    let out = solve_mms(&inst).unwrap();
    assert_eq!(out.verdict, MmsVerdict::Found);
    assert!(!out.trail.is_empty());
}

#[test]
fn sop_preserves_thresholds() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let inst = random_instance(&mut rng, 3, 7, -5, 5);
        let sop = to_sop(&inst).unwrap();
        assert_eq!(
            mms_thresholds(&inst).unwrap(),
            mms_thresholds(&sop.inst).unwrap()
        );
    }
}

#[test]
fn mimic_leaves_non_negative_instances_alone() {
    let inst = Instance::from_ints(&[[1, 2, 3], [3, 2, 1]]).unwrap();
    assert_eq!(mimic_instance(&inst, 0).unwrap(), inst);
    let three = Instance::from_ints(&[[-1, -1, -1], [-2, -1, -3], [2, 2, 2]]).unwrap();
    let out = mimic_instance(&three, 2).unwrap();
    assert_eq!(out.utilities[0], three.utilities[2]);
    assert_eq!(out.utilities[1], three.utilities[2]);
}
