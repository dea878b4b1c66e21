//! C ABI over `gsv-core`.
//!
//! Sources are opaque handles created from JSON or a preset name and released
//! with [`gsv_source_free`]. Every fallible call returns a [`GsvStatus`]; on
//! failure [`gsv_last_error_message`] describes the error for the calling
//! thread. Strings returned through out-parameters are owned by the caller
//! and must be released with [`gsv_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gsv_core::classifier::{classify, Category};
use gsv_core::error::GsvError;
use gsv_core::extractors::{select, Extractor, ExtractorKind, OutputKind};
use gsv_core::model::{sample_sequence, ConstantDie, SourceSpec};
use gsv_core::oracle::{self, ExtractorTable};
use gsv_core::rational::{self, Rational};

/// Opaque source handle.
pub struct GsvSource {
    spec: SourceSpec,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidSource = 4,
    Parameter = 5,
    NotExtractable = 6,
    NotNkPlus = 7,
    EpsilonTooLarge = 8,
    TreeLimit = 9,
    Limit = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsvCategory {
    ExpError = 0,
    PolyError = 1,
    NonExtractable = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(err: &GsvError) -> GsvStatus {
    match err {
        GsvError::Parse(_) => GsvStatus::Parse,
        GsvError::InvalidSource(_) => GsvStatus::InvalidSource,
        GsvError::NotHnk => GsvStatus::NotExtractable,
        GsvError::NotNkPlus { .. } => GsvStatus::NotNkPlus,
        GsvError::EpsilonTooLarge { .. } => GsvStatus::EpsilonTooLarge,
        GsvError::TreeLimit { .. } | GsvError::EnumLimit { .. } => GsvStatus::TreeLimit,
        GsvError::MLimit { .. } | GsvError::SubsetLimit { .. } => GsvStatus::Limit,
        _ => GsvStatus::Parameter,
    }
}

fn fail(status: GsvStatus, message: &str) -> GsvStatus {
    set_error(message);
    status
}

fn guarded(body: impl FnOnce() -> Result<(), GsvStatus>) -> GsvStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            GsvStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(GsvStatus::Panic, "internal panic"),
    }
}

fn core(err: GsvError) -> GsvStatus {
    fail(status_of(&err), &err.to_string())
}

/// # Safety
/// `text` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, GsvStatus> {
    if text.is_null() {
        return Err(fail(GsvStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|_| fail(GsvStatus::InvalidUtf8, "string argument is not UTF-8"))
}

/// # Safety
/// `text` must be null or a valid NUL-terminated string.
unsafe fn read_opt_rational(text: *const c_char) -> Result<Option<Rational>, GsvStatus> {
    if text.is_null() {
        return Ok(None);
    }
    Ok(Some(rational::parse(read_str(text)?).map_err(core)?))
}

/// # Safety
/// `source` must be null or a live handle.
unsafe fn read_source<'a>(source: *const GsvSource) -> Result<&'a GsvSource, GsvStatus> {
    source
        .as_ref()
        .ok_or_else(|| fail(GsvStatus::NullPointer, "null source handle"))
}

fn into_c_string(text: String) -> *mut c_char {
    CString::new(text).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn new_handle(spec: SourceSpec, out: *mut *mut GsvSource) {
    // SAFETY: callers check `out` for null before building the spec.
    unsafe { *out = Box::into_raw(Box::new(GsvSource { spec })) };
}

/// Message describing the last failure on this thread; empty after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn gsv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a source from JSON (`{"faces": [...], "dice": [[...], ...]}` with
/// probabilities as `"p/q"` strings or integers).
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gsv_source_from_json(json: *const c_char, out: *mut *mut GsvSource) -> GsvStatus {
    guarded(|| {
        if out.is_null() {
            return Err(fail(GsvStatus::NullPointer, "null output pointer"));
        }
        let spec = SourceSpec::from_json(read_str(json)?).map_err(core)?;
        new_handle(spec, out);
        Ok(())
    })
}

/// Builds one of the bundled sources: `e1`, `e2`, `fair-coin`, `two-dice`,
/// `sv` or `sv:<delta>`.
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gsv_source_preset(name: *const c_char, out: *mut *mut GsvSource) -> GsvStatus {
    guarded(|| {
        if out.is_null() {
            return Err(fail(GsvStatus::NullPointer, "null output pointer"));
        }
        let spec = gsv_core::corpus::preset(read_str(name)?).map_err(core)?;
        new_handle(spec, out);
        Ok(())
    })
}

/// # Safety
/// `source` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gsv_source_free(source: *mut GsvSource) {
    if !source.is_null() {
        drop(Box::from_raw(source));
    }
}

/// # Safety
/// `source` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gsv_source_num_faces(source: *const GsvSource) -> usize {
    source.as_ref().map_or(0, |s| s.spec.num_faces())
}

/// # Safety
/// `source` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gsv_source_num_dice(source: *const GsvSource) -> usize {
    source.as_ref().map_or(0, |s| s.spec.num_dice())
}

/// Classifies the source. `report_json` may be null; otherwise it receives
/// the full report as JSON, to be released with [`gsv_string_free`].
///
/// # Safety
/// `source` must be a live handle, `category` a valid pointer and
/// `report_json` null or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gsv_classify(
    source: *const GsvSource,
    category: *mut GsvCategory,
    report_json: *mut *mut c_char,
) -> GsvStatus {
    guarded(|| {
        let source = read_source(source)?;
        if category.is_null() {
            return Err(fail(GsvStatus::NullPointer, "null category pointer"));
        }
        let report = classify(&source.spec).map_err(core)?;
        *category = match report.category {
            Category::ExpError => GsvCategory::ExpError,
            Category::PolyError => GsvCategory::PolyError,
            Category::NonExtractable => GsvCategory::NonExtractable,
        };
        if !report_json.is_null() {
            let text = serde_json::to_string(&report).map_err(|e| fail(GsvStatus::Parameter, &e.to_string()))?;
            *report_json = into_c_string(text);
        }
        Ok(())
    })
}

/// Samples `n` faces with the adversary always rolling `die`.
///
/// # Safety
/// `source` must be a live handle and `faces_out` point to `n` writable
/// `size_t` slots.
#[no_mangle]
pub unsafe extern "C" fn gsv_sample_constant(
    source: *const GsvSource,
    die: usize,
    n: usize,
    seed: u64,
    faces_out: *mut usize,
) -> GsvStatus {
    guarded(|| {
        let source = read_source(source)?;
        if faces_out.is_null() && n > 0 {
            return Err(fail(GsvStatus::NullPointer, "null faces buffer"));
        }
        let faces = sample_sequence(&source.spec, &ConstantDie(die), n, seed).map_err(core)?;
        if n > 0 {
            std::slice::from_raw_parts_mut(faces_out, n).copy_from_slice(&faces);
        }
        Ok(())
    })
}

/// Runs a named extractor (`threshold`, `bit-exp`, `multibit-naive`,
/// `multibit-fast`) on `len` faces. `epsilon` is required for `threshold`
/// and may be null otherwise; `m` is the output length of the multi-bit
/// extractors. Bit outputs are written as 0 (for -1) or 1 (for +1).
///
/// # Safety
/// `source` must be a live handle, `extractor` a NUL-terminated string,
/// `epsilon` null or a NUL-terminated string, `faces` point to `len`
/// readable `size_t` values and `out_index` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gsv_extract(
    source: *const GsvSource,
    extractor: *const c_char,
    epsilon: *const c_char,
    m: u32,
    faces: *const usize,
    len: usize,
    out_index: *mut u64,
) -> GsvStatus {
    guarded(|| {
        let source = read_source(source)?;
        if out_index.is_null() || (faces.is_null() && len > 0) {
            return Err(fail(GsvStatus::NullPointer, "null buffer argument"));
        }
        let kind: ExtractorKind = read_str(extractor)?.parse().map_err(core)?;
        let eps = read_opt_rational(epsilon)?;
        let seq: &[usize] = if len == 0 { &[] } else { std::slice::from_raw_parts(faces, len) };
        let k = source.spec.num_faces();
        if let Some(&bad) = seq.iter().find(|&&f| f >= k) {
            return Err(fail(GsvStatus::Parameter, &format!("face {bad} outside the alphabet of {k}")));
        }
        let (ext, _) = select(&source.spec, kind, eps.as_ref(), m as usize).map_err(core)?;
        *out_index = ext.extract(seq).index();
        Ok(())
    })
}

/// Exact worst-case bias of a named bit extractor on `n` samples (for the
/// multi-bit extractors, the worst-case distance to uniform). `bias_text`
/// may be null; otherwise it receives the exact value as `"p/q"`.
///
/// # Safety
/// `source` must be a live handle, `extractor` a NUL-terminated string,
/// `epsilon` null or a NUL-terminated string, `bias` a valid pointer and
/// `bias_text` null or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gsv_worst_case_bias(
    source: *const GsvSource,
    extractor: *const c_char,
    epsilon: *const c_char,
    m: u32,
    n: usize,
    bias: *mut f64,
    bias_text: *mut *mut c_char,
) -> GsvStatus {
    guarded(|| {
        let source = read_source(source)?;
        if bias.is_null() {
            return Err(fail(GsvStatus::NullPointer, "null bias pointer"));
        }
        let kind: ExtractorKind = read_str(extractor)?.parse().map_err(core)?;
        let eps = read_opt_rational(epsilon)?;
        let (ext, _) = select(&source.spec, kind, eps.as_ref(), m as usize).map_err(core)?;
        let table = ExtractorTable::new(&ext, n);
        let value = match ext.output_kind() {
            OutputKind::Bit => oracle::exact_extremes(&source.spec, &table).map_err(core)?.bias,
            OutputKind::Index { m } => oracle::exact_multibit_error(&source.spec, &table, m).map_err(core)?.0,
        };
        *bias = rational::to_f64(&value);
        if !bias_text.is_null() {
            *bias_text = into_c_string(rational::format(&value));
        }
        Ok(())
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `text` must be null or a string returned through an out-parameter of this
/// library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gsv_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}
