//! C ABI over the `ermlr` classifier.
//!
//! Every fallible function returns an [`ErmlrStatus`]. On failure the message
//! is kept per thread and read with [`ermlr_last_error_message`]. Handles are
//! opaque; free them with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ermlr::classify::ClassifierModel;
use ermlr::hawkes::{log_density, ExponentialKernel, ModelParams, Path};
use ermlr::rng::SeedStream;
use ermlr::simulate::BranchingSampler;
use ermlr::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErmlrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Io = 4,
    Parse = 5,
    DegenerateWeights = 6,
    UnstableAdjacency = 7,
    BufferTooSmall = 8,
    Internal = 99,
}

/// Trained classifier.
pub struct ErmlrModel {
    inner: ClassifierModel,
}

/// Event path under construction or parsed from JSON.
pub struct ErmlrPath {
    horizon: f64,
    events: Vec<Vec<f64>>,
}

impl ErmlrPath {
    fn build(&self) -> Result<Path, Error> {
        let mut events = self.events.clone();
        for e in &mut events {
            e.sort_by(f64::total_cmp);
        }
        Path::new(self.horizon, events)
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> ErmlrStatus {
    match err {
        Error::InvalidArgument(_) | Error::InvalidPath(_) | Error::InfeasibleScenario(_) | Error::EmptyDataset => {
            ErmlrStatus::InvalidArgument
        }
        Error::DimensionMismatch { .. } => ErmlrStatus::DimensionMismatch,
        Error::DegenerateWeights => ErmlrStatus::DegenerateWeights,
        Error::UnstableAdjacency(_) => ErmlrStatus::UnstableAdjacency,
        Error::Io(_) => ErmlrStatus::Io,
        Error::Json(_) | Error::Csv(_) => ErmlrStatus::Parse,
    }
}

fn guard<F: FnOnce() -> Result<(), (ErmlrStatus, String)>>(f: F) -> ErmlrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ErmlrStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ErmlrStatus::Internal
        }
    }
}

fn lib_err(err: Error) -> (ErmlrStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (ErmlrStatus, String) {
    (ErmlrStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, (ErmlrStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (ErmlrStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn params_arg(mu: *const f64, a: *const f64, dim: usize) -> Result<ModelParams, (ErmlrStatus, String)> {
    if mu.is_null() || a.is_null() {
        return Err(null("parameter array"));
    }
    if dim == 0 {
        return Err((ErmlrStatus::InvalidArgument, "dimension must be >= 1".into()));
    }
    let mu = std::slice::from_raw_parts(mu, dim).to_vec();
    let a = std::slice::from_raw_parts(a, dim * dim).to_vec();
    ModelParams::from_flat(mu, a).map_err(lib_err)
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ermlr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ermlr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a model from its JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ermlr_model_from_json(json: *const c_char, out: *mut *mut ErmlrModel) -> ErmlrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = str_arg(json, "json")?;
        let inner: ClassifierModel = serde_json::from_str(text).map_err(|e| lib_err(e.into()))?;
        inner.validate().map_err(lib_err)?;
        *out = Box::into_raw(Box::new(ErmlrModel { inner }));
        Ok(())
    })
}

/// Loads a model JSON file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ermlr_model_load(path: *const c_char, out: *mut *mut ErmlrModel) -> ErmlrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let file = str_arg(path, "path")?;
        let inner: ClassifierModel = ermlr::io::read_json(std::path::Path::new(file)).map_err(lib_err)?;
        inner.validate().map_err(lib_err)?;
        *out = Box::into_raw(Box::new(ErmlrModel { inner }));
        Ok(())
    })
}

/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ermlr_model_free(model: *mut ErmlrModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ermlr_model_num_classes(model: *const ErmlrModel, out: *mut usize) -> ErmlrStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = m.inner.num_classes();
        Ok(())
    })
}

/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ermlr_model_dim(model: *const ErmlrModel, out: *mut usize) -> ErmlrStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = m.inner.dim();
        Ok(())
    })
}

/// Creates an empty path with `dim` components on `(0, horizon]`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ermlr_path_new(dim: usize, horizon: f64, out: *mut *mut ErmlrPath) -> ErmlrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        Path::empty(horizon, dim).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(ErmlrPath {
            horizon,
            events: vec![Vec::new(); dim],
        }));
        Ok(())
    })
}

/// Appends an event at `time` to the 0-based `component`. Events may arrive
/// in any order; duplicates within a component are rejected when the path
/// is used.
///
/// # Safety
/// `path` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn ermlr_path_push(path: *mut ErmlrPath, component: usize, time: f64) -> ErmlrStatus {
    guard(|| {
        let p = path.as_mut().ok_or_else(|| null("path"))?;
        if component >= p.events.len() {
            return Err((
                ErmlrStatus::DimensionMismatch,
                format!("component {component} outside 0..{}", p.events.len()),
            ));
        }
        if !(time > 0.0 && time <= p.horizon) {
            return Err((
                ErmlrStatus::InvalidArgument,
                format!("event time {time} outside (0, {}]", p.horizon),
            ));
        }
        p.events[component].push(time);
        Ok(())
    })
}

/// Parses a path from JSON `{"T": ..., "events": [[...], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ermlr_path_from_json(json: *const c_char, out: *mut *mut ErmlrPath) -> ErmlrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = str_arg(json, "json")?;
        let path: Path = serde_json::from_str(text).map_err(|e| lib_err(e.into()))?;
        *out = Box::into_raw(Box::new(ErmlrPath {
            horizon: path.horizon(),
            events: path.all_events().to_vec(),
        }));
        Ok(())
    })
}

/// # Safety
/// `path` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ermlr_path_free(path: *mut ErmlrPath) {
    if !path.is_null() {
        drop(Box::from_raw(path));
    }
}

/// # Safety
/// `path` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ermlr_path_total_events(path: *const ErmlrPath, out: *mut usize) -> ErmlrStatus {
    guard(|| {
        let p = path.as_ref().ok_or_else(|| null("path"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = p.events.iter().map(Vec::len).sum();
        Ok(())
    })
}

/// Number of events in the 0-based `component`, or the times themselves when
/// `times` is non-null and `capacity` is large enough.
///
/// # Safety
/// `path` and `count` must be valid; `times` may be null or point to
/// `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ermlr_path_events(
    path: *const ErmlrPath,
    component: usize,
    times: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> ErmlrStatus {
    guard(|| {
        let p = path.as_ref().ok_or_else(|| null("path"))?;
        let count = count.as_mut().ok_or_else(|| null("count"))?;
        let events = p
            .events
            .get(component)
            .ok_or_else(|| (ErmlrStatus::DimensionMismatch, format!("no component {component}")))?;
        *count = events.len();
        if times.is_null() {
            return Ok(());
        }
        if capacity < events.len() {
            return Err((ErmlrStatus::BufferTooSmall, format!("need {} slots", events.len())));
        }
        let mut sorted = events.clone();
        sorted.sort_by(f64::total_cmp);
        std::slice::from_raw_parts_mut(times, events.len()).copy_from_slice(&sorted);
        Ok(())
    })
}

/// Writes the class posterior of `path` into `probs[0..len]`; `len` must equal
/// the number of classes.
///
/// # Safety
/// `model`, `path` must be valid handles and `probs` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ermlr_model_posterior(
    model: *const ErmlrModel,
    path: *const ErmlrPath,
    probs: *mut f64,
    len: usize,
) -> ErmlrStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let p = path.as_ref().ok_or_else(|| null("path"))?;
        if probs.is_null() {
            return Err(null("probs"));
        }
        if len != m.inner.num_classes() {
            return Err((
                ErmlrStatus::BufferTooSmall,
                format!("need exactly {} slots", m.inner.num_classes()),
            ));
        }
        let post = m.inner.posterior(&p.build().map_err(lib_err)?).map_err(lib_err)?;
        std::slice::from_raw_parts_mut(probs, len).copy_from_slice(post.probs());
        Ok(())
    })
}

/// Predicted 1-based label of `path`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ermlr_model_predict(
    model: *const ErmlrModel,
    path: *const ErmlrPath,
    label: *mut usize,
) -> ErmlrStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let p = path.as_ref().ok_or_else(|| null("path"))?;
        let label = label.as_mut().ok_or_else(|| null("label"))?;
        *label = m.inner.predict(&p.build().map_err(lib_err)?).map_err(lib_err)?;
        Ok(())
    })
}

/// Log-density of `path` under baselines `mu[dim]`, row-major adjacency
/// `a[dim*dim]` and kernel rate `beta`. `clamped` (optional) reports whether
/// an intensity hit the log floor.
///
/// # Safety
/// Array pointers must hold the stated number of doubles; `path` and `out`
/// must be valid; `clamped` may be null.
#[no_mangle]
pub unsafe extern "C" fn ermlr_log_density(
    mu: *const f64,
    a: *const f64,
    dim: usize,
    beta: f64,
    path: *const ErmlrPath,
    out: *mut f64,
    clamped: *mut bool,
) -> ErmlrStatus {
    guard(|| {
        let params = params_arg(mu, a, dim)?;
        let kernel = ExponentialKernel::new(beta).map_err(lib_err)?;
        let p = path.as_ref().ok_or_else(|| null("path"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let built = p.build().map_err(lib_err)?;
        if built.dim() != dim {
            return Err(lib_err(Error::DimensionMismatch {
                expected: dim,
                got: built.dim(),
            }));
        }
        let ld = log_density(&params, &kernel, &built);
        *out = ld.value;
        if let Some(c) = clamped.as_mut() {
            *c = ld.clamped;
        }
        Ok(())
    })
}

/// Draws one path on `(0, horizon]` from a stable nonnegative model. The
/// same `(seed, index)` pair always yields the same path.
///
/// # Safety
/// Array pointers must hold the stated number of doubles and `out` must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn ermlr_simulate(
    mu: *const f64,
    a: *const f64,
    dim: usize,
    beta: f64,
    horizon: f64,
    seed: u64,
    index: u64,
    out: *mut *mut ErmlrPath,
) -> ErmlrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = params_arg(mu, a, dim)?;
        let kernel = ExponentialKernel::new(beta).map_err(lib_err)?;
        let sampler = BranchingSampler::new(&params, &kernel).map_err(lib_err)?;
        let mut rng = SeedStream::new(seed).rng(index);
        let path = sampler.sample(horizon, &mut rng).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(ErmlrPath {
            horizon: path.horizon(),
            events: path.all_events().to_vec(),
        }));
        Ok(())
    })
}
