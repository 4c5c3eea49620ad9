//! C ABI for the `nashpg` crate.
//!
//! Games are opaque handles created with [`nashpg_game_new`] and released with
//! [`nashpg_game_free`]. Every fallible call returns a [`NashpgStatus`]; on
//! failure [`nashpg_last_error`] describes the most recent error on the
//! calling thread.
//!
//! Behavioral strategies cross the boundary as flat arrays: for each
//! information set of the player in index order, the probabilities of its
//! actions in order. [`nashpg_game_strategy_len`] gives the array length.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nashpg::efg::{self, BehavioralProfile, BehavioralStrategy, ExtensiveFormGame, Player};
use nashpg::nashpg::{to_profile, train_nashpg, TrainConfig};
use nashpg::nfg::{BregmanGeometry, MixedProfile, NormalFormGame};
use nashpg::registry::load_game;
use nashpg::solvers::{iterative_m, SolverConfig};
use nashpg::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NashpgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownGame = 3,
    DimensionMismatch = 4,
    Domain = 5,
    Runtime = 6,
    Panic = 7,
}

/// Opaque game handle.
pub struct NashpgGame {
    game: ExtensiveFormGame,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn status_of(e: &Error) -> NashpgStatus {
    match e {
        Error::DimensionMismatch { .. } | Error::MissingInfoset { .. } => {
            NashpgStatus::DimensionMismatch
        }
        Error::Domain(_) => NashpgStatus::Domain,
        Error::InvalidArgument(_) | Error::Config(_) | Error::Parse { .. } => {
            NashpgStatus::InvalidArgument
        }
        _ => NashpgStatus::Runtime,
    }
}

struct Failure(NashpgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NashpgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            NashpgStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            NashpgStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(NashpgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn game_ref<'a>(game: *const NashpgGame) -> Result<&'a ExtensiveFormGame, Failure> {
    game.as_ref().map(|g| &g.game).ok_or_else(|| null("game"))
}

fn mismatch(expected: usize, got: usize) -> Failure {
    Failure(
        NashpgStatus::DimensionMismatch,
        format!("expected an array of length {expected}, got {got}"),
    )
}

fn player_of(player: u32) -> Result<Player, Failure> {
    match player {
        1 => Ok(Player::One),
        2 => Ok(Player::Two),
        _ => Err(Failure(
            NashpgStatus::InvalidArgument,
            format!("player must be 1 or 2, got {player}"),
        )),
    }
}

unsafe fn out_ref<'a, T>(out: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    out.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn slice_mut<'a>(data: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(data, len))
}

fn strategy_len(game: &ExtensiveFormGame, player: Player) -> usize {
    game.infosets(player).iter().map(|i| i.num_actions()).sum()
}

fn unflatten(
    game: &ExtensiveFormGame,
    player: Player,
    flat: &[f64],
) -> Result<BehavioralStrategy, Failure> {
    let expected = strategy_len(game, player);
    if flat.len() != expected {
        return Err(mismatch(expected, flat.len()));
    }
    let mut rest = flat;
    let probs = game
        .infosets(player)
        .iter()
        .map(|i| {
            let (head, tail) = rest.split_at(i.num_actions());
            rest = tail;
            head.to_vec()
        })
        .collect();
    let s = BehavioralStrategy { probs };
    s.check(game, player)?;
    Ok(s)
}

fn flatten_into(probs: &[Vec<f64>], out: &mut [f64]) -> Result<(), Failure> {
    let total: usize = probs.iter().map(Vec::len).sum();
    if out.len() != total {
        return Err(mismatch(total, out.len()));
    }
    for (dst, src) in out.iter_mut().zip(probs.iter().flatten()) {
        *dst = *src;
    }
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn nashpg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a game by registry name (`kuhn`, `leduc`, `rps`, `matrix:<path>`, ...).
/// Matrix games are wrapped as a one-shot tree.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nashpg_game_new(
    name: *const c_char,
    out: *mut *mut NashpgGame,
) -> NashpgStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        if name.is_null() {
            return Err(null("name"));
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| Failure(NashpgStatus::InvalidArgument, "name is not UTF-8".into()))?;
        let game = load_game(name)
            .map_err(|e| Failure(NashpgStatus::UnknownGame, e.to_string()))?
            .to_extensive();
        *out = Box::into_raw(Box::new(NashpgGame { game }));
        Ok(())
    })
}

/// Releases a handle from [`nashpg_game_new`]; null is ignored.
///
/// # Safety
/// `game` must be null or a live handle, and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn nashpg_game_free(game: *mut NashpgGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// # Safety
/// `game` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nashpg_game_num_infosets(
    game: *const NashpgGame,
    player: u32,
    out: *mut usize,
) -> NashpgStatus {
    guard(|| {
        let g = game_ref(game)?;
        *out_ref(out, "out")? = g.infosets(player_of(player)?).len();
        Ok(())
    })
}

/// # Safety
/// `game` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nashpg_game_num_actions(
    game: *const NashpgGame,
    player: u32,
    infoset: usize,
    out: *mut usize,
) -> NashpgStatus {
    guard(|| {
        let g = game_ref(game)?;
        let sets = g.infosets(player_of(player)?);
        let set = sets.get(infoset).ok_or_else(|| {
            Failure(
                NashpgStatus::InvalidArgument,
                format!("infoset {infoset} out of range ({} sets)", sets.len()),
            )
        })?;
        *out_ref(out, "out")? = set.num_actions();
        Ok(())
    })
}

/// Length of the flat strategy array for `player`.
///
/// # Safety
/// `game` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nashpg_game_strategy_len(
    game: *const NashpgGame,
    player: u32,
    out: *mut usize,
) -> NashpgStatus {
    guard(|| {
        let g = game_ref(game)?;
        *out_ref(out, "out")? = strategy_len(g, player_of(player)?);
        Ok(())
    })
}

/// Exact exploitability of a behavioral profile given as two flat arrays.
///
/// # Safety
/// `p1` and `p2` must point to `len1` and `len2` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nashpg_exploitability(
    game: *const NashpgGame,
    p1: *const f64,
    len1: usize,
    p2: *const f64,
    len2: usize,
    out: *mut f64,
) -> NashpgStatus {
    guard(|| {
        let g = game_ref(game)?;
        let s1 = unflatten(g, Player::One, slice(p1, len1, "p1")?)?;
        let s2 = unflatten(g, Player::Two, slice(p2, len2, "p2")?)?;
        *out_ref(out, "out")? = efg::exploitability(g, &BehavioralProfile::new(s1, s2))?;
        Ok(())
    })
}

/// Solves the row-major `rows × cols` matrix game (payoffs to the row
/// player) with `outer` refinement steps of `inner` mirror-descent steps.
/// Writes the final mixed strategies and their exploitability.
///
/// # Safety
/// `matrix` must hold `rows * cols` doubles, `x_out` `rows` and `y_out`
/// `cols`; `exploitability_out` must be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn nashpg_solve_matrix(
    matrix: *const f64,
    rows: usize,
    cols: usize,
    alpha: f64,
    eta: f64,
    inner: usize,
    outer: usize,
    x_out: *mut f64,
    y_out: *mut f64,
    exploitability_out: *mut f64,
) -> NashpgStatus {
    guard(|| {
        let len = rows.checked_mul(cols).ok_or_else(|| {
            Failure(
                NashpgStatus::InvalidArgument,
                "matrix size overflows".into(),
            )
        })?;
        let entries = slice(matrix, len, "matrix")?.to_vec();
        let game = NormalFormGame::new(rows, cols, entries)?;
        let cfg = SolverConfig {
            alpha,
            eta,
            inner_max_iters: inner,
            outer_iters: outer,
            ..SolverConfig::default()
        };
        let z0 = MixedProfile::uniform(rows, cols);
        let rec = iterative_m(&game, BregmanGeometry::NegativeEntropy, &z0, &cfg, None)?;
        let last = rec.last().expect("initial row");
        slice_mut(x_out, rows, "x_out")?.copy_from_slice(&last.profile.x);
        slice_mut(y_out, cols, "y_out")?.copy_from_slice(&last.profile.y);
        *out_ref(exploitability_out, "exploitability_out")? = last.exploitability;
        Ok(())
    })
}

/// Trains NashPG and writes the final policies as flat strategy arrays
/// together with their exact exploitability.
///
/// # Safety
/// `p1_out` and `p2_out` must have room for `len1` and `len2` doubles;
/// `exploitability_out` must be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn nashpg_train(
    game: *const NashpgGame,
    alpha: f64,
    eta: f64,
    inner: usize,
    outer: usize,
    batch: usize,
    seed: u64,
    p1_out: *mut f64,
    len1: usize,
    p2_out: *mut f64,
    len2: usize,
    exploitability_out: *mut f64,
) -> NashpgStatus {
    guard(|| {
        let g = game_ref(game)?;
        let cfg = TrainConfig {
            alpha,
            eta,
            inner_iters: inner,
            outer_iters: outer,
            batch_size: batch,
            seed,
            ..TrainConfig::default()
        };
        let p1 = slice_mut(p1_out, len1, "p1_out")?;
        let p2 = slice_mut(p2_out, len2, "p2_out")?;
        for (player, len) in [(Player::One, len1), (Player::Two, len2)] {
            let expected = strategy_len(g, player);
            if len != expected {
                return Err(mismatch(expected, len));
            }
        }
        let rec = train_nashpg(g, &cfg)?;
        let last = rec.checkpoints.last().expect("initial checkpoint");
        let profile = to_profile(&last.policies);
        flatten_into(&profile.strategy(Player::One).probs, p1)?;
        flatten_into(&profile.strategy(Player::Two).probs, p2)?;
        *out_ref(exploitability_out, "exploitability_out")? = last.exploitability;
        Ok(())
    })
}
