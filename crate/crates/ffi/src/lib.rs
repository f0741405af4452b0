//! C ABI over the `binec` crate.
//!
//! Objects are opaque handles created by `*_new`/`*_parse`/`*_build` calls and
//! released with the matching `*_free`. Every fallible call returns a
//! [`BinecStatus`]; on failure [`binec_last_error_message`] describes the
//! error. Bit matrices cross the boundary as one byte (0 or 1) per bit in
//! row-major order.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use binec::bounds::{self, RateReport};
use binec::channel::{ChannelParams, LiftedTransfer, Probability};
use binec::codes::{self, Codebook, Decoder};
use binec::metric::Distance;
use binec::network::{cauchy_transfer, mds_family, random_mds_transfer, sample_until_mds, Network, TransferPair};
use binec::{BitMatrix, Error, Field};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Guard = 4,
    Singular = 5,
    OutOfRange = 6,
    Regime = 7,
    Retries = 8,
    Io = 9,
    Panic = 10,
}

pub struct BinecField(Field);

pub struct BinecNetwork(Network);

pub struct BinecTransfer {
    tp: TransferPair,
    field: Field,
}

pub struct BinecCodebook(Codebook);

/// Rates at one parameter point; undefined entries are NaN and `k_star` is 0 when absent.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct BinecRateReport {
    pub hamming_asym: f64,
    pub hamming_finite: f64,
    pub gv_asym: f64,
    pub gv_finite_coh: f64,
    pub gv_finite_noncoh: f64,
    pub r1: f64,
    pub r2: f64,
    pub k_star: u32,
    pub r_ours: f64,
    pub regime_ok: bool,
}

/// Distance reported by [`binec_codebook_decode`] when no codeword is reachable.
pub const BINEC_DISTANCE_INFINITE: u64 = u64::MAX;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> BinecStatus {
    match err {
        Error::Parse { .. } | Error::Format(_) => BinecStatus::Parse,
        Error::Guard(_) | Error::BudgetExceedsTargets { .. } => BinecStatus::Guard,
        Error::Singular | Error::ZeroInverse => BinecStatus::Singular,
        Error::OutOfRange { .. } | Error::NotInField { .. } => BinecStatus::OutOfRange,
        Error::Regime(_) => BinecStatus::Regime,
        Error::RetriesExhausted { .. } => BinecStatus::Retries,
        Error::Io(_) => BinecStatus::Io,
        _ => BinecStatus::InvalidArgument,
    }
}

struct Fail(BinecStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(BinecStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status.
fn guarded(f: impl FnOnce() -> Result<(), Fail>) -> BinecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            BinecStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            BinecStatus::Panic
        }
    }
}

unsafe fn obj<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(BinecStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn bits<'a>(p: *const u8, len: usize, what: &str) -> Result<&'a [u8], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn bits_mut<'a>(p: *mut u8, len: usize, what: &str) -> Result<&'a mut [u8], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn matrix(rows: usize, cols: usize, data: &[u8]) -> Result<BitMatrix, Fail> {
    if data.len() != rows * cols {
        return Err(Fail(
            BinecStatus::InvalidArgument,
            format!("expected {} bits for a {rows}x{cols} matrix, got {}", rows * cols, data.len()),
        ));
    }
    Ok(BitMatrix::from_bits(rows, cols, data)?)
}

fn copy_bits(m: &BitMatrix, dst: &mut [u8]) -> Result<(), Fail> {
    let src = m.to_bits();
    if dst.len() != src.len() {
        return Err(Fail(
            BinecStatus::InvalidArgument,
            format!("output buffer holds {} bits, need {}", dst.len(), src.len()),
        ));
    }
    dst.copy_from_slice(&src);
    Ok(())
}

fn boxed<T>(value: T, dst: &mut *mut T) {
    *dst = Box::into_raw(Box::new(value));
}

/// Message for the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn binec_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn binec_field_new(m: u32, field_out: *mut *mut BinecField) -> BinecStatus {
    guarded(|| {
        let dst = out(field_out, "field_out")?;
        boxed(BinecField(Field::new(m)?), dst);
        Ok(())
    })
}

/// # Safety
/// `field` must come from [`binec_field_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn binec_field_free(field: *mut BinecField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn binec_field_mul(field: *const BinecField, a: u32, b: u32, result: *mut u32) -> BinecStatus {
    guarded(|| {
        let f = &obj(field, "field")?.0;
        *out(result, "result")? = f.mul(f.elem(a)?, f.elem(b)?).value();
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn binec_field_inv(field: *const BinecField, a: u32, result: *mut u32) -> BinecStatus {
    guarded(|| {
        let f = &obj(field, "field")?.0;
        *out(result, "result")? = f.inv(f.elem(a)?)?.value();
        Ok(())
    })
}

/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn binec_entropy(p: f64, result: *mut f64) -> BinecStatus {
    guarded(|| {
        *out(result, "result")? = bounds::entropy(p)?;
        Ok(())
    })
}

/// `n = 0` requests the asymptotic forms only.
///
/// # Safety
/// `report` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn binec_rate_report(
    p: f64,
    c: u32,
    e: u32,
    m: u32,
    n: u32,
    report: *mut BinecRateReport,
) -> BinecStatus {
    guarded(|| {
        let dst = out(report, "report")?;
        let r = RateReport::compute(p, c as usize, e as usize, m, (n > 0).then_some(n as usize))?;
        let nan = |v: Option<f64>| v.unwrap_or(f64::NAN);
        *dst = BinecRateReport {
            hamming_asym: nan(r.hamming_asym),
            hamming_finite: nan(r.hamming_finite),
            gv_asym: nan(r.gv_asym),
            gv_finite_coh: nan(r.gv_finite_coh),
            gv_finite_noncoh: nan(r.gv_finite_noncoh),
            r1: r.benchmarks.r1,
            r2: r.benchmarks.r2,
            k_star: r.benchmarks.k_star.unwrap_or(0) as u32,
            r_ours: r.benchmarks.r_ours,
            regime_ok: r.regime_ok,
        };
        Ok(())
    })
}

/// Parses the text network format.
///
/// # Safety
/// `text` must be a nul-terminated string and `network_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn binec_network_parse(text_in: *const c_char, network_out: *mut *mut BinecNetwork) -> BinecStatus {
    guarded(|| {
        let dst = out(network_out, "network_out")?;
        boxed(BinecNetwork(Network::parse(text(text_in, "text")?)?), dst);
        Ok(())
    })
}

/// # Safety
/// `network` must come from [`binec_network_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn binec_network_free(network: *mut BinecNetwork) {
    if !network.is_null() {
        drop(Box::from_raw(network));
    }
}

/// Validates the network and reports its mincut `C` and edge count `E`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn binec_network_capacity(network: *const BinecNetwork, c: *mut u32, e: *mut u32) -> BinecStatus {
    guarded(|| {
        let cap = obj(network, "network")?.0.validate()?;
        *out(c, "c")? = cap.c as u32;
        *out(e, "e")? = cap.e as u32;
        Ok(())
    })
}

/// Draws coding coefficients with seeds `seed, seed + 1, ...` until `T̂` is MDS.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn binec_transfer_sample(
    network: *const BinecNetwork,
    field: *const BinecField,
    seed: u64,
    max_retries: u32,
    transfer_out: *mut *mut BinecTransfer,
) -> BinecStatus {
    guarded(|| {
        let net = &obj(network, "network")?.0;
        let f = obj(field, "field")?.0;
        let dst = out(transfer_out, "transfer_out")?;
        let (_, tp) = sample_until_mds(net, &f, seed, max_retries)?;
        boxed(BinecTransfer { tp, field: f }, dst);
        Ok(())
    })
}

/// An MDS `C x E` impulse response with source edges `0..C`: Cauchy when
/// `2^m >= C + E`, seeded random otherwise.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn binec_transfer_synthetic(
    field: *const BinecField,
    c: u32,
    e: u32,
    seed: u64,
    max_retries: u32,
    transfer_out: *mut *mut BinecTransfer,
) -> BinecStatus {
    guarded(|| {
        let f = obj(field, "field")?.0;
        let dst = out(transfer_out, "transfer_out")?;
        let (c, e) = (c as usize, e as usize);
        let tp = if (c + e) as u64 <= f.order() as u64 {
            cauchy_transfer(&f, c, e)?
        } else {
            random_mds_transfer(&f, c, e, seed, max_retries)?
        };
        boxed(BinecTransfer { tp, field: f }, dst);
        Ok(())
    })
}

/// # Safety
/// `transfer` must come from a `binec_transfer_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn binec_transfer_free(transfer: *mut BinecTransfer) {
    if !transfer.is_null() {
        drop(Box::from_raw(transfer));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn binec_transfer_dims(transfer: *const BinecTransfer, c: *mut u32, e: *mut u32) -> BinecStatus {
    guarded(|| {
        let t = obj(transfer, "transfer")?;
        *out(c, "c")? = t.tp.c() as u32;
        *out(e, "e")? = t.tp.e() as u32;
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn binec_transfer_is_mds(transfer: *const BinecTransfer, result: *mut bool) -> BinecStatus {
    guarded(|| {
        let t = obj(transfer, "transfer")?;
        *out(result, "result")? = t.tp.is_mds(&t.field);
        Ok(())
    })
}

/// `Y = lift(T) X + lift(T̂) Z` with `X` of `Cm x n`, `Z` of `Em x n` and `Y` of `Cm x n` bits.
///
/// # Safety
/// Buffers must hold the stated number of bytes.
#[no_mangle]
pub unsafe extern "C" fn binec_transmit(
    transfer: *const BinecTransfer,
    n: u32,
    x: *const u8,
    x_len: usize,
    z: *const u8,
    z_len: usize,
    y: *mut u8,
    y_len: usize,
) -> BinecStatus {
    guarded(|| {
        let t = obj(transfer, "transfer")?;
        let m = t.field.m() as usize;
        let n = n as usize;
        let xm = matrix(t.tp.c() * m, n, bits(x, x_len, "x")?)?;
        let zm = matrix(t.tp.e() * m, n, bits(z, z_len, "z")?)?;
        let ym = LiftedTransfer::new(&t.tp, &t.field).transmit(&xm, &zm)?;
        copy_bits(&ym, bits_mut(y, y_len, "y")?)
    })
}

/// Greedy codebook for `p = p_num / p_den`. Non-coherent books use every MDS
/// matrix over the field as the family, with the transfer's source edges.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn binec_codebook_build(
    transfer: *const BinecTransfer,
    n: u32,
    p_num: u64,
    p_den: u64,
    seed: u64,
    noncoherent: bool,
    codebook_out: *mut *mut BinecCodebook,
) -> BinecStatus {
    guarded(|| {
        let t = obj(transfer, "transfer")?;
        let dst = out(codebook_out, "codebook_out")?;
        let p = Probability::new(p_num, p_den)?;
        let params = ChannelParams::new(t.tp.c(), t.tp.e(), t.field.m(), n as usize, p)?;
        let cb = if noncoherent {
            let family = mds_family(&t.field, t.tp.c(), t.tp.e(), t.tp.source_edges())?;
            codes::gv_construct_noncoherent(&family, &t.field, &params, seed)?
        } else {
            codes::gv_construct_coherent(&t.tp, &t.field, &params, seed)?
        };
        boxed(BinecCodebook(cb), dst);
        Ok(())
    })
}

/// # Safety
/// `codebook` must come from a `binec_codebook_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn binec_codebook_free(codebook: *mut BinecCodebook) {
    if !codebook.is_null() {
        drop(Box::from_raw(codebook));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn binec_codebook_len(codebook: *const BinecCodebook, len: *mut usize) -> BinecStatus {
    guarded(|| {
        *out(len, "len")? = obj(codebook, "codebook")?.0.len();
        Ok(())
    })
}

/// Rows `Cm` and columns `n` of each codeword.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn binec_codebook_shape(codebook: *const BinecCodebook, rows: *mut u32, cols: *mut u32) -> BinecStatus {
    guarded(|| {
        let p = obj(codebook, "codebook")?.0.params();
        *out(rows, "rows")? = (p.c * p.m as usize) as u32;
        *out(cols, "cols")? = p.n as u32;
        Ok(())
    })
}

/// Writes codeword `message` into `x` (`Cm * n` bytes).
///
/// # Safety
/// `x` must hold `x_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn binec_codebook_encode(
    codebook: *const BinecCodebook,
    message: usize,
    x: *mut u8,
    x_len: usize,
) -> BinecStatus {
    guarded(|| {
        let cb = &obj(codebook, "codebook")?.0;
        copy_bits(&cb.encode(message)?, bits_mut(x, x_len, "x")?)
    })
}

/// Minimum-distance decoding of `y` (`Cm * n` bytes). Coherent books need
/// `transfer`; non-coherent ones ignore it and may be passed null.
///
/// # Safety
/// Pointers must be valid; `y` must hold `y_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn binec_codebook_decode(
    codebook: *const BinecCodebook,
    transfer: *const BinecTransfer,
    y: *const u8,
    y_len: usize,
    message: *mut usize,
    distance: *mut u64,
    unique: *mut bool,
) -> BinecStatus {
    guarded(|| {
        let cb = &obj(codebook, "codebook")?.0;
        let tp = transfer.as_ref().map(|t| &t.tp);
        let p = cb.params();
        let ym = matrix(p.c * p.m as usize, p.n, bits(y, y_len, "y")?)?;
        let d = Decoder::new(cb, tp)?.decode(&ym)?;
        *out(message, "message")? = d.message;
        *out(distance, "distance")? = match d.distance {
            Distance::Finite(v) => v,
            Distance::Infinite => BINEC_DISTANCE_INFINITE,
        };
        *out(unique, "unique")? = d.unique;
        Ok(())
    })
}

/// # Safety
/// `path` must be a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn binec_codebook_write(codebook: *const BinecCodebook, path: *const c_char) -> BinecStatus {
    guarded(|| {
        let cb = &obj(codebook, "codebook")?.0;
        cb.write(text(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `path` must be a nul-terminated string and `codebook_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn binec_codebook_read(path: *const c_char, codebook_out: *mut *mut BinecCodebook) -> BinecStatus {
    guarded(|| {
        let dst = out(codebook_out, "codebook_out")?;
        boxed(BinecCodebook(Codebook::read(text(path, "path")?)?), dst);
        Ok(())
    })
}
