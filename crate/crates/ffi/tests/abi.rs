use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use nashpg_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(nashpg_last_error()) }
        .to_string_lossy()
        .into_owned()
}

struct Handle(*mut NashpgGame);

impl Handle {
    fn new(name: &str) -> Result<Self, NashpgStatus> {
        let name = CString::new(name).unwrap();
        let mut out = ptr::null_mut();
        match unsafe { nashpg_game_new(name.as_ptr(), &mut out) } {
            NashpgStatus::Ok => Ok(Handle(out)),
            status => {
                assert!(out.is_null());
                Err(status)
            }
        }
    }

    fn strategy_len(&self, player: u32) -> usize {
        let mut n = 0;
        assert_eq!(
            unsafe { nashpg_game_strategy_len(self.0, player, &mut n) },
            NashpgStatus::Ok
        );
        n
    }
}

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { nashpg_game_free(self.0) };
    }
}

#[test]
fn kuhn_queries() {
    let g = Handle::new("kuhn").unwrap();
    for player in [1, 2] {
        let mut n = 0;
        assert_eq!(
            unsafe { nashpg_game_num_infosets(g.0, player, &mut n) },
            NashpgStatus::Ok
        );
        assert_eq!(n, 6);
        let mut a = 0;
        assert_eq!(
            unsafe { nashpg_game_num_actions(g.0, player, 0, &mut a) },
            NashpgStatus::Ok
        );
        assert_eq!(a, 2);
        assert_eq!(g.strategy_len(player), 12);
    }
    let mut a = 0;
    assert_eq!(
        unsafe { nashpg_game_num_actions(g.0, 1, 99, &mut a) },
        NashpgStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { nashpg_game_num_actions(g.0, 3, 0, &mut a) },
        NashpgStatus::InvalidArgument
    );
    assert!(last_error().contains("player"));
}

#[test]
fn unknown_game_and_null_pointers() {
    assert_eq!(Handle::new("go").err(), Some(NashpgStatus::UnknownGame));
    assert!(last_error().contains("unknown game"));
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { nashpg_game_new(ptr::null(), &mut out) },
        NashpgStatus::NullPointer
    );
    let mut n = 0;
    assert_eq!(
        unsafe { nashpg_game_num_infosets(ptr::null(), 1, &mut n) },
        NashpgStatus::NullPointer
    );
    unsafe { nashpg_game_free(ptr::null_mut()) };
}

#[test]
fn uniform_kuhn_exploitability_and_errors() {
    let g = Handle::new("kuhn").unwrap();
    let p = vec![0.5; 12];
    let mut e = 0.0;
    let status = unsafe { nashpg_exploitability(g.0, p.as_ptr(), 12, p.as_ptr(), 12, &mut e) };
    assert_eq!(status, NashpgStatus::Ok);
    assert!((e - 0.458_333_333_333_333_3).abs() < 1e-12, "{e}");
    assert_eq!(last_error(), "");

    let status = unsafe { nashpg_exploitability(g.0, p.as_ptr(), 11, p.as_ptr(), 12, &mut e) };
    assert_eq!(status, NashpgStatus::DimensionMismatch);
    let mut bad = p.clone();
    bad[0] = 0.9;
    let status = unsafe { nashpg_exploitability(g.0, bad.as_ptr(), 12, p.as_ptr(), 12, &mut e) };
    assert_ne!(status, NashpgStatus::Ok);
    assert!(!last_error().is_empty());
}

#[test]
fn solve_matching_pennies() {
    let a = [1.0, -1.0, -1.0, 1.0];
    let (mut x, mut y, mut e) = ([0.0; 2], [0.0; 2], 1.0);
    let status = unsafe {
        nashpg_solve_matrix(
            a.as_ptr(),
            2,
            2,
            0.2,
            0.05,
            1000,
            50,
            x.as_mut_ptr(),
            y.as_mut_ptr(),
            &mut e,
        )
    };
    assert_eq!(status, NashpgStatus::Ok);
    assert!(e < 1e-6);
    assert!((x[0] - 0.5).abs() < 1e-6 && (y[1] - 0.5).abs() < 1e-6);

    let status = unsafe {
        nashpg_solve_matrix(
            a.as_ptr(),
            2,
            2,
            -1.0,
            0.05,
            10,
            5,
            x.as_mut_ptr(),
            y.as_mut_ptr(),
            &mut e,
        )
    };
    assert_eq!(status, NashpgStatus::InvalidArgument);
}

#[test]
fn short_training_run() {
    let g = Handle::new("kuhn").unwrap();
    let (mut p1, mut p2, mut e) = (vec![0.0; 12], vec![0.0; 12], 0.0);
    let status = unsafe {
        nashpg_train(
            g.0,
            0.2,
            0.1,
            50,
            4,
            32,
            7,
            p1.as_mut_ptr(),
            12,
            p2.as_mut_ptr(),
            12,
            &mut e,
        )
    };
    assert_eq!(status, NashpgStatus::Ok);
    assert!(e > 0.0 && e < 0.458);
    for pair in p1.chunks(2).chain(p2.chunks(2)) {
        assert!((pair[0] + pair[1] - 1.0).abs() < 1e-12);
        assert!(pair.iter().all(|&v| v > 0.0));
    }
    let mut check = 0.0;
    unsafe { nashpg_exploitability(g.0, p1.as_ptr(), 12, p2.as_ptr(), 12, &mut check) };
    assert!((check - e).abs() < 1e-12);

    let status = unsafe {
        nashpg_train(
            g.0,
            0.2,
            0.1,
            50,
            4,
            32,
            7,
            p1.as_mut_ptr(),
            10,
            p2.as_mut_ptr(),
            12,
            &mut e,
        )
    };
    assert_eq!(status, NashpgStatus::DimensionMismatch);
}

#[test]
fn generated_header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/nashpg.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for symbol in [
        "nashpg_game_new",
        "nashpg_game_free",
        "nashpg_exploitability",
        "nashpg_solve_matrix",
        "nashpg_train",
        "nashpg_last_error",
        "NASHPG_STATUS_OK",
    ] {
        assert!(text.contains(symbol), "{symbol} missing from header");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c99"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler found; skipping syntax check");
        return;
    };
    assert!(status.success());
}
