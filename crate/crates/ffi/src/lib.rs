//! C ABI over the settlement generator.
//!
//! Worlds are opaque handles owned by the caller and released with
//! `sg_world_free`. Every fallible call returns an `SgStatus`; on failure the
//! message is kept per thread and read with `sg_last_error_message`. Strings
//! returned by the library are released with `sg_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use settlegen::export::{export_http, ExportOptions};
use settlegen::geom::Cell;
use settlegen::pipeline::{run_pipeline, PipelineConfig};
use settlegen::world::{load_world, save_world, world_from_json, world_to_json, VoxelWorld};
use settlegen::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Parse = 4,
    OutOfBounds = 5,
    Stage = 6,
    Network = 7,
    Io = 8,
    Internal = 9,
}

/// Opaque world handle.
pub struct SgWorld {
    inner: VoxelWorld,
}

/// Outcome of an HTTP export.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SgExportReport {
    pub placed: usize,
    pub failed: usize,
    pub batches: usize,
    pub retries: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SgStatus {
    match e {
        Error::Config(_) | Error::IllegalPlacement { .. } => SgStatus::Config,
        Error::Parse { .. } | Error::UnsupportedVersion { .. } => SgStatus::Parse,
        Error::OutOfBounds { .. } => SgStatus::OutOfBounds,
        Error::Stage { .. } | Error::GatePlacement { .. } | Error::Unreachable { .. } => SgStatus::Stage,
        Error::Network(_) | Error::DimensionMismatch { .. } => SgStatus::Network,
        Error::Io(_) => SgStatus::Io,
    }
}

struct Failure(SgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Run `f`, turning errors and panics into a status plus last-error message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SgStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            SgStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(SgStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(SgStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn world_arg<'a>(p: *const SgWorld) -> Result<&'a SgWorld, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(SgStatus::NullArgument, "world is null".into()))
}

fn out_arg<T>(p: *mut T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(SgStatus::NullArgument, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn boxed(world: VoxelWorld) -> *mut SgWorld {
    Box::into_raw(Box::new(SgWorld { inner: world }))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Load a world JSON file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_world_load(path: *const c_char, out: *mut *mut SgWorld) -> SgStatus {
    guard(|| {
        out_arg(out, "out")?;
        let world = load_world(str_arg(path, "path")?)?;
        *out = boxed(world);
        Ok(())
    })
}

/// Parse a world from a JSON document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_world_from_json(json: *const c_char, out: *mut *mut SgWorld) -> SgStatus {
    guard(|| {
        out_arg(out, "out")?;
        let world = world_from_json(str_arg(json, "json")?)?;
        *out = boxed(world);
        Ok(())
    })
}

/// Flat world of the given size and altitude.
#[no_mangle]
pub extern "C" fn sg_world_new_flat(width: usize, length: usize, altitude: i32) -> *mut SgWorld {
    boxed(VoxelWorld::flat(width, length, altitude))
}

/// Release a world handle. Null is ignored.
///
/// # Safety
/// `world` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sg_world_free(world: *mut SgWorld) {
    if !world.is_null() {
        drop(Box::from_raw(world));
    }
}

/// Write the world JSON to `path`.
///
/// # Safety
/// `world` must be a live handle and `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sg_world_save(world: *const SgWorld, path: *const c_char) -> SgStatus {
    guard(|| {
        let w = world_arg(world)?;
        save_world(&w.inner, str_arg(path, "path")?)?;
        Ok(())
    })
}

/// World JSON as a new string; release with `sg_string_free`.
///
/// # Safety
/// `world` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_world_to_json(world: *const SgWorld, out: *mut *mut c_char) -> SgStatus {
    guard(|| {
        out_arg(out, "out")?;
        *out = into_c_string(world_to_json(&world_arg(world)?.inner));
        Ok(())
    })
}

/// Width of the world, or 0 for a null handle.
///
/// # Safety
/// `world` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_world_width(world: *const SgWorld) -> usize {
    world.as_ref().map_or(0, |w| w.inner.width())
}

/// Length of the world, or 0 for a null handle.
///
/// # Safety
/// `world` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_world_length(world: *const SgWorld) -> usize {
    world.as_ref().map_or(0, |w| w.inner.length())
}

/// Number of entries in the edit log, or 0 for a null handle.
///
/// # Safety
/// `world` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_world_edit_count(world: *const SgWorld) -> usize {
    world.as_ref().map_or(0, |w| w.inner.edits().len())
}

/// Surface altitude of column `(x, z)`.
///
/// # Safety
/// `world` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_world_altitude(world: *const SgWorld, x: usize, z: usize, out: *mut i32) -> SgStatus {
    guard(|| {
        out_arg(out, "out")?;
        let w = &world_arg(world)?.inner;
        let c = Cell::new(x, z);
        w.check(c)?;
        *out = w.altitude(c);
        Ok(())
    })
}

/// Run the full pipeline from a JSON configuration (null or empty for the
/// defaults). On success `out_world` receives the finished world and, when
/// not null, `out_report` the report JSON.
///
/// # Safety
/// `config_json` must be null or a nul-terminated string; `out_world` must be
/// writable; `out_report` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sg_pipeline_run(
    config_json: *const c_char,
    out_world: *mut *mut SgWorld,
    out_report: *mut *mut c_char,
) -> SgStatus {
    guard(|| {
        out_arg(out_world, "out_world")?;
        let config = if config_json.is_null() {
            PipelineConfig::default()
        } else {
            match str_arg(config_json, "config_json")?.trim() {
                "" => PipelineConfig::default(),
                text => PipelineConfig::from_json(text)?,
            }
        };
        let (world, report) = run_pipeline(&config)?;
        if !out_report.is_null() {
            let json = serde_json::to_string(&report).map_err(|e| Failure(SgStatus::Internal, e.to_string()))?;
            *out_report = into_c_string(json);
        }
        *out_world = boxed(world);
        Ok(())
    })
}

/// Send the world's edit log to a block-placement endpoint with default
/// batching and retries.
///
/// # Safety
/// `world` must be a live handle, `url` a nul-terminated string, and `out`
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn sg_export_http(
    world: *const SgWorld,
    url: *const c_char,
    out: *mut SgExportReport,
) -> SgStatus {
    guard(|| {
        let w = world_arg(world)?;
        let r = export_http(&w.inner, str_arg(url, "url")?, &ExportOptions::default())?;
        if !out.is_null() {
            *out = SgExportReport {
                placed: r.placed,
                failed: r.failed,
                batches: r.batches,
                retries: r.retries,
            };
        }
        Ok(())
    })
}
