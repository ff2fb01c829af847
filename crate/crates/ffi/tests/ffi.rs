use dmab_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn last_error() -> String {
    let p = dmab_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn two_state_chain_round_trip() {
    unsafe {
        let mut chain = ptr::null_mut();
        assert_eq!(dmab_chain_new_two_state(0.3, 0.5, &mut chain), DmabStatus::Ok);
        let mut stats = DmabChainStats::default();
        assert_eq!(dmab_chain_stats(chain, &mut stats), DmabStatus::Ok);
        assert!((stats.mean - 0.375).abs() < 1e-12);
        assert_eq!(stats.states, 2);
        assert!((stats.rho - (1.0 - 0.2f64.powi(2))).abs() < 1e-12);
        let mut pi = [0.0; 2];
        assert_eq!(dmab_chain_stationary(chain, pi.as_mut_ptr(), 2), DmabStatus::Ok);
        assert!((pi[1] - 0.375).abs() < 1e-12);
        assert_eq!(dmab_chain_stationary(chain, pi.as_mut_ptr(), 1), DmabStatus::InvalidArgument);
        dmab_chain_free(chain);
    }
}

#[test]
fn invalid_chain_reports_an_error() {
    unsafe {
        let mut chain = ptr::null_mut();
        assert_eq!(dmab_chain_new_two_state(1.5, 0.5, &mut chain), DmabStatus::InvalidArgument);
        assert!(chain.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(dmab_chain_new_two_state(0.3, 0.5, ptr::null_mut()), DmabStatus::NullPointer);
        assert!(last_error().contains("out"));
        let rewards = [0.5, 1.0];
        let p = [0.9, 0.1, 0.2, 0.8];
        assert_eq!(dmab_chain_new(rewards.as_ptr(), p.as_ptr(), 2, &mut chain), DmabStatus::Ok);
        dmab_chain_free(chain);
    }
}

#[test]
fn auction_and_oracle_agree_on_fig2_matrix() {
    let v = [0.8, 0.6, 0.6, 0.35];
    let mut a = [9usize; 2];
    let mut b = [9usize; 2];
    let (mut sa, mut sb, mut rounds) = (0.0, 0.0, 0u64);
    unsafe {
        assert_eq!(dmab_auction(v.as_ptr(), 2, 2, 0.01, a.as_mut_ptr(), &mut sa, &mut rounds), DmabStatus::Ok);
        assert_eq!(dmab_brute_force_matching(v.as_ptr(), 2, 2, b.as_mut_ptr(), &mut sb), DmabStatus::Ok);
        assert_eq!(
            dmab_auction(v.as_ptr(), 2, 2, 0.0, a.as_mut_ptr(), ptr::null_mut(), ptr::null_mut()),
            DmabStatus::InvalidArgument
        );
    }
    assert_eq!(a, [1, 0]);
    assert_eq!(a, b);
    assert!((sa - 1.2).abs() < 1e-12 && (sb - 1.2).abs() < 1e-12);
    assert!(rounds >= 1);
}

#[test]
fn bounds_match_the_library() {
    let means = [0.8, 0.6];
    let (mut t1, mut t2) = (0.0, 0.0);
    unsafe {
        assert_eq!(dmab_bound_t1(means.as_ptr(), 2, 1, std::f64::consts::E, &mut t1), DmabStatus::Ok);
        assert_eq!(dmab_bound_t2(means.as_ptr(), 2, 1.0, 1e4, &mut t2), DmabStatus::Ok);
        assert_eq!(dmab_bound_t2(means.as_ptr(), 2, 1.0, 0.5, &mut t2), DmabStatus::UndefinedBound);
        assert_eq!(dmab_bound_t2(means.as_ptr(), 1, 1.0, 1e4, &mut t2), DmabStatus::InvalidArgument);
    }
    assert!((t1 - 40.858).abs() < 1e-3);
    assert!(t2 > 0.0);
}

const SMOKE: &str = r#"
scenario = "single_iid"
horizon = 10
seeds = [1]

[arms]
kind = "bernoulli"
means = [0.8, 0.6]

[policy]
algorithm = "ucb4"
cost = { base = 1.0 }
"#;

#[test]
fn config_runs_to_the_golden_csv() {
    let text = CString::new(SMOKE).unwrap();
    let golden =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/data/smoke.csv")).unwrap();
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(dmab_config_parse(text.as_ptr(), &mut cfg), DmabStatus::Ok);
        let mut csv = ptr::null_mut();
        assert_eq!(dmab_config_run_csv(cfg, &mut csv), DmabStatus::Ok);
        assert_eq!(CStr::from_ptr(csv).to_str().unwrap(), golden);
        dmab_string_free(csv);
        let mut b = ptr::null_mut();
        assert_eq!(dmab_config_bounds_csv(cfg, &mut b), DmabStatus::Ok);
        assert!(CStr::from_ptr(b).to_str().unwrap().starts_with("t,bound\n1,4.8"));
        dmab_string_free(b);
        dmab_config_free(cfg);
    }
}

#[test]
fn bad_config_names_the_field() {
    let text = CString::new("scenario = \"single_iid\"\nhorizon = 10\nseeds = 1\nbogus = 3\n").unwrap();
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(dmab_config_parse(text.as_ptr(), &mut cfg), DmabStatus::Config);
        assert!(cfg.is_null());
        assert!(last_error().contains("bogus"), "{}", last_error());
        assert_eq!(dmab_config_parse(ptr::null(), &mut cfg), DmabStatus::NullPointer);
    }
}

#[test]
fn null_handles_are_ignored_by_free() {
    unsafe {
        dmab_chain_free(ptr::null_mut());
        dmab_config_free(ptr::null_mut());
        dmab_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/dmab.h")).unwrap();
    assert!(header.contains("#ifndef DMAB_H"));
    for name in [
        "typedef struct DmabChain DmabChain;",
        "typedef struct DmabConfig DmabConfig;",
        "DMAB_STATUS_OK = 0",
        "DMAB_STATUS_PANIC = 8",
        "dmab_last_error(void)",
        "dmab_string_free(",
        "dmab_chain_new_two_state(",
        "dmab_chain_stats(",
        "dmab_chain_free(",
        "dmab_config_parse(",
        "dmab_config_run_csv(",
        "dmab_config_bounds_csv(",
        "dmab_config_free(",
        "dmab_auction(",
        "dmab_brute_force_matching(",
        "dmab_bound_t1(",
        "dmab_bound_t2(",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile_dir();
    let src = dir.join("use.c");
    std::fs::write(
        &src,
        "#include \"dmab.h\"\nint main(void) { DmabChain *c = 0; DmabStatus s = dmab_chain_new_two_state(0.3, 0.5, &c); dmab_chain_free(c); return (int)s; }\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", concat!(env!("CARGO_MANIFEST_DIR"), "/include")])
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("dmab-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
