//! C ABI for seqlab.
//!
//! Every function returns a [`SeqlabStatus`]; results come back through out
//! pointers. Handles are opaque and must be released with the matching
//! `*_free` function. On failure, [`seqlab_last_error`] describes the most
//! recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigUint;

use seqlab::measures::{correlation, well_distribution, CorrelationOptions};
use seqlab::morphic::SequencePrefix;
use seqlab::source::{sequence_preset, system_preset, Numeration};
use seqlab::witness::{build_certificate, find_collisions, largest_m, verify_certificate};
use seqlab::Error;

/// Status codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BudgetExceeded = 3,
    VerificationFailed = 4,
    OutOfRange = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// A numeration system `U`.
pub struct SeqlabSystem {
    inner: Numeration,
}

/// A finite binary prefix.
pub struct SeqlabSequence {
    inner: SequencePrefix,
}

/// Maximizer of one correlation measure. `d_star` holds `order` offsets
/// when the caller supplied a buffer.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SeqlabCorrelation {
    pub value: u64,
    pub m_star: usize,
    pub order: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SeqlabWellDistribution {
    pub value: u64,
    pub a_star: usize,
    pub b_star: usize,
    pub m_star: usize,
}

/// A verified lower bound `C_order(s, N) >= block` for `N >= implied_n`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SeqlabCertificate {
    pub order: usize,
    pub m: usize,
    pub block: u64,
    pub implied_n: u64,
    pub verified: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(SeqlabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::BudgetExceeded { .. } => SeqlabStatus::BudgetExceeded,
            Error::VerificationFailed { .. } | Error::Mismatch { .. } => SeqlabStatus::VerificationFailed,
            Error::OutOfRange(_) | Error::IndexOutOfPrefix { .. } | Error::Capacity { .. } => SeqlabStatus::OutOfRange,
            _ => SeqlabStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: SeqlabStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SeqlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SeqlabStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SeqlabStatus::Panic
        }
    }
}

unsafe fn name_arg<'a>(name: *const c_char) -> Result<&'a str, Failure> {
    if name.is_null() {
        return fail(SeqlabStatus::NullPointer, "name is null");
    }
    CStr::from_ptr(name)
        .to_str()
        .or_else(|_| fail(SeqlabStatus::InvalidArgument, "name is not UTF-8"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .map_or_else(|| fail(SeqlabStatus::NullPointer, format!("{what} is null")), Ok)
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .map_or_else(|| fail(SeqlabStatus::NullPointer, format!("{what} is null")), Ok)
}

/// Library version as a static, nul-terminated string.
#[no_mangle]
pub extern "C" fn seqlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failure on this thread, or null after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn seqlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a system preset such as `"fibonacci"` or `"ex41"`.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn seqlab_system_preset(name: *const c_char, out_system: *mut *mut SeqlabSystem) -> SeqlabStatus {
    guard(|| {
        let slot = out(out_system, "out_system")?;
        let inner = system_preset(name_arg(name)?)?;
        *slot = Box::into_raw(Box::new(SeqlabSystem { inner }));
        Ok(())
    })
}

/// # Safety
/// `system` must come from [`seqlab_system_preset`] or be null.
#[no_mangle]
pub unsafe extern "C" fn seqlab_system_free(system: *mut SeqlabSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// `U(i)`, failing with `OutOfRange` above `u64::MAX`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn seqlab_system_value(
    system: *const SeqlabSystem,
    i: usize,
    out_value: *mut u64,
) -> SeqlabStatus {
    guard(|| {
        let sys = &deref(system, "system")?.inner.system;
        let slot = out(out_value, "out_value")?;
        match sys.value_u64(i) {
            Some(v) => *slot = v,
            None => return fail(SeqlabStatus::OutOfRange, format!("U({i}) exceeds 64 bits")),
        }
        Ok(())
    })
}

/// Greedy representation of `n`, most significant digit first. Writes the
/// length to `out_len` even when `cap` is too small.
///
/// # Safety
/// `digits` must hold `cap` elements unless `cap` is 0.
#[no_mangle]
pub unsafe extern "C" fn seqlab_system_rep(
    system: *const SeqlabSystem,
    n: u64,
    digits: *mut u32,
    cap: usize,
    out_len: *mut usize,
) -> SeqlabStatus {
    guard(|| {
        let sys = &deref(system, "system")?.inner.system;
        let len = out(out_len, "out_len")?;
        let rep = sys.rep_u64(n);
        *len = rep.len();
        if rep.len() > cap {
            return fail(
                SeqlabStatus::BufferTooSmall,
                format!("representation has {} digits", rep.len()),
            );
        }
        if !rep.is_empty() {
            if digits.is_null() {
                return fail(SeqlabStatus::NullPointer, "digits is null");
            }
            ptr::copy_nonoverlapping(rep.as_ptr(), digits, rep.len());
        }
        Ok(())
    })
}

/// First `n` symbols of a sequence preset such as `"thue_morse"`.
///
/// # Safety
/// `name` must be a nul-terminated string and `out_sequence` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn seqlab_sequence_generate(
    name: *const c_char,
    n: usize,
    out_sequence: *mut *mut SeqlabSequence,
) -> SeqlabStatus {
    guard(|| {
        let slot = out(out_sequence, "out_sequence")?;
        let inner = sequence_preset(name_arg(name)?)?.generate(n)?;
        *slot = Box::into_raw(Box::new(SeqlabSequence { inner }));
        Ok(())
    })
}

/// Wraps caller-supplied binary symbols.
///
/// # Safety
/// `symbols` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn seqlab_sequence_from_symbols(
    symbols: *const u8,
    len: usize,
    out_sequence: *mut *mut SeqlabSequence,
) -> SeqlabStatus {
    guard(|| {
        let slot = out(out_sequence, "out_sequence")?;
        let data = if len == 0 {
            Vec::new()
        } else if symbols.is_null() {
            return fail(SeqlabStatus::NullPointer, "symbols is null");
        } else {
            std::slice::from_raw_parts(symbols, len).to_vec()
        };
        *slot = Box::into_raw(Box::new(SeqlabSequence {
            inner: SequencePrefix::binary(data, "ffi")?,
        }));
        Ok(())
    })
}

/// # Safety
/// `sequence` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn seqlab_sequence_free(sequence: *mut SeqlabSequence) {
    if !sequence.is_null() {
        drop(Box::from_raw(sequence));
    }
}

/// Number of symbols, or 0 for a null handle.
///
/// # Safety
/// `sequence` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn seqlab_sequence_len(sequence: *const SeqlabSequence) -> usize {
    sequence.as_ref().map_or(0, |s| s.inner.len())
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn seqlab_sequence_get(
    sequence: *const SeqlabSequence,
    i: usize,
    out_symbol: *mut u8,
) -> SeqlabStatus {
    guard(|| {
        let s = &deref(sequence, "sequence")?.inner;
        let slot = out(out_symbol, "out_symbol")?;
        match s.symbols().get(i) {
            Some(&b) => *slot = b,
            None => {
                return fail(
                    SeqlabStatus::OutOfRange,
                    format!("index {i} is outside a prefix of length {}", s.len()),
                )
            }
        }
        Ok(())
    })
}

/// Copies up to `cap` symbols into `buf`; the number written goes to `out_written`.
///
/// # Safety
/// `buf` must hold `cap` bytes unless `cap` is 0.
#[no_mangle]
pub unsafe extern "C" fn seqlab_sequence_copy(
    sequence: *const SeqlabSequence,
    buf: *mut u8,
    cap: usize,
    out_written: *mut usize,
) -> SeqlabStatus {
    guard(|| {
        let s = deref(sequence, "sequence")?.inner.symbols();
        let written = out(out_written, "out_written")?;
        let n = s.len().min(cap);
        if n > 0 {
            if buf.is_null() {
                return fail(SeqlabStatus::NullPointer, "buf is null");
            }
            ptr::copy_nonoverlapping(s.as_ptr(), buf, n);
        }
        *written = n;
        Ok(())
    })
}

/// Exact `C_k(s, N)`. A zero `budget` selects the default step budget.
/// If `d_star` is non-null it receives `k` offsets.
///
/// # Safety
/// `d_star` must hold `k` elements when non-null.
#[no_mangle]
pub unsafe extern "C" fn seqlab_correlation(
    sequence: *const SeqlabSequence,
    n: usize,
    k: usize,
    budget: u64,
    out_result: *mut SeqlabCorrelation,
    d_star: *mut usize,
) -> SeqlabStatus {
    guard(|| {
        let s = &deref(sequence, "sequence")?.inner;
        let slot = out(out_result, "out_result")?;
        let opts = if budget == 0 {
            CorrelationOptions::default()
        } else {
            CorrelationOptions::exact(budget as u128)
        };
        let r = correlation(s, n, k, &opts)?;
        *slot = SeqlabCorrelation {
            value: r.value,
            m_star: r.m_star,
            order: r.order,
        };
        if !d_star.is_null() {
            let d = r.d_star.as_slice();
            ptr::copy_nonoverlapping(d.as_ptr(), d_star, d.len());
        }
        Ok(())
    })
}

/// Exact `W(s, N)`. A zero `budget` selects the default step budget.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn seqlab_well_distribution(
    sequence: *const SeqlabSequence,
    n: usize,
    budget: u64,
    out_result: *mut SeqlabWellDistribution,
) -> SeqlabStatus {
    guard(|| {
        let s = &deref(sequence, "sequence")?.inner;
        let slot = out(out_result, "out_result")?;
        let budget = if budget == 0 {
            CorrelationOptions::default().budget
        } else {
            budget as u128
        };
        let r = well_distribution(s, n, budget)?;
        *slot = SeqlabWellDistribution {
            value: r.value,
            a_star: r.a_star,
            b_star: r.b_star,
            m_star: r.m_star,
        };
        Ok(())
    })
}

/// Builds and verifies an order-`order` certificate for an automatic
/// sequence preset. With `m == 0` the largest block fitting in `capacity`
/// symbols is chosen. Positions go to `positions` (`order` elements) when
/// non-null.
///
/// # Safety
/// `name` must be a nul-terminated string; `positions` must hold `order`
/// elements when non-null.
#[no_mangle]
pub unsafe extern "C" fn seqlab_certify(
    name: *const c_char,
    order: usize,
    m: usize,
    capacity: usize,
    out_certificate: *mut SeqlabCertificate,
    positions: *mut u64,
) -> SeqlabStatus {
    guard(|| {
        let slot = out(out_certificate, "out_certificate")?;
        if order == 0 || order % 2 == 1 {
            return fail(
                SeqlabStatus::InvalidArgument,
                format!("order must be even and positive, got {order}"),
            );
        }
        let src = sequence_preset(name_arg(name)?)?;
        let Some(num) = src.numeration() else {
            return fail(
                SeqlabStatus::InvalidArgument,
                format!("{} is not given by a DFAO", src.name),
            );
        };
        let p = src.product()?;
        let w = find_collisions(&p, &num.system, order / 2)?;
        let m = if m > 0 {
            m
        } else {
            match largest_m(&w, &num.system, capacity)? {
                Some(m) => m,
                None => {
                    return fail(
                        SeqlabStatus::OutOfRange,
                        format!("no certificate fits in {capacity} symbols"),
                    )
                }
            }
        };
        let cert = build_certificate(&w, &num.system, m)?;
        let small =
            |x: &BigUint| u64::try_from(x).or_else(|_| fail(SeqlabStatus::OutOfRange, format!("{x} exceeds 64 bits")));
        let implied = small(&cert.implied_n())?;
        let len = usize::try_from(implied).ok().filter(|&n| n <= 1 << 28).map_or_else(
            || fail(SeqlabStatus::OutOfRange, format!("certificate needs {implied} symbols")),
            Ok,
        )?;
        let cert = verify_certificate(&src.generate(len)?, &cert)?;
        let pos = cert.positions.iter().map(small).collect::<Result<Vec<_>, _>>()?;
        *slot = SeqlabCertificate {
            order: cert.order,
            m: cert.m,
            block: small(&cert.block)?,
            implied_n: implied,
            verified: cert.verified,
        };
        if !positions.is_null() {
            ptr::copy_nonoverlapping(pos.as_ptr(), positions, pos.len());
        }
        Ok(())
    })
}
