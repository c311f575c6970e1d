//! C ABI over the `loosehc` library.
//!
//! Every fallible function returns an [`LhcStatus`]; on failure a message is
//! kept per thread and can be read with [`lhc_last_error_message`].
//! Hypergraphs are opaque handles released with [`lhc_hypergraph_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use loosehc::analysis;
use loosehc::configuration::sample_lambda_d;
use loosehc::coupling::split_probability;
use loosehc::hamilton::{count_loose_hamilton, find_loose_hamilton};
use loosehc::hypergraph::{generate_hnpk, KUniformHypergraph};
use loosehc::Error;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LhcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Divisibility = 3,
    OutsideDomain = 4,
    RejectionCapExceeded = 5,
    BufferTooSmall = 6,
    OutOfRange = 7,
    Internal = 8,
}

/// Opaque k-uniform hypergraph.
pub struct LhcHypergraph {
    inner: KUniformHypergraph,
    /// Edges in sorted order, for indexed access.
    edges: Vec<Vec<u32>>,
}

impl LhcHypergraph {
    fn boxed(inner: KUniformHypergraph) -> *mut LhcHypergraph {
        let edges = inner.edges().iter().map(|e| e.vertices().to_vec()).collect();
        Box::into_raw(Box::new(LhcHypergraph { inner, edges }))
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: LhcStatus, msg: impl Into<String>) -> LhcStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> LhcStatus {
    let status = match e {
        Error::Divisibility { .. } => LhcStatus::Divisibility,
        Error::OutsideDomain { .. } => LhcStatus::OutsideDomain,
        Error::RejectionCapExceeded { .. } => LhcStatus::RejectionCapExceeded,
        _ => LhcStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> LhcStatus) -> LhcStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(LhcStatus::Internal, "internal panic"),
    }
}

macro_rules! deref {
    ($p:expr) => {
        match unsafe { $p.as_ref() } {
            Some(v) => v,
            None => return fail(LhcStatus::NullPointer, concat!("null pointer: ", stringify!($p))),
        }
    };
}

macro_rules! out {
    ($p:expr) => {
        match unsafe { $p.as_mut() } {
            Some(v) => v,
            None => return fail(LhcStatus::NullPointer, concat!("null pointer: ", stringify!($p))),
        }
    };
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length
/// including the terminator.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn lhc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n - 1) = 0;
            }
        }
        bytes.len()
    })
}

/// Samples `H(n, p; k)` with the given seed.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lhc_hypergraph_generate(
    n: usize,
    k: usize,
    p: f64,
    seed: u64,
    out: *mut *mut LhcHypergraph,
) -> LhcStatus {
    guard(|| {
        let out = out!(out);
        match generate_hnpk(n, k, p, seed) {
            Ok(h) => {
                *out = LhcHypergraph::boxed(h);
                LhcStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// The complete k-uniform hypergraph on `n` vertices.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lhc_hypergraph_complete(n: usize, k: usize, out: *mut *mut LhcHypergraph) -> LhcStatus {
    guard(|| {
        let out = out!(out);
        match KUniformHypergraph::complete(n, k) {
            Ok(h) => {
                *out = LhcHypergraph::boxed(h);
                LhcStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Builds a hypergraph from `edge_count` edges stored row-major in
/// `vertices` (`edge_count * k` one-based labels).
///
/// # Safety
/// `vertices` must be valid for `edge_count * k` reads; `out` for writes.
#[no_mangle]
pub unsafe extern "C" fn lhc_hypergraph_from_edges(
    n: usize,
    k: usize,
    vertices: *const u32,
    edge_count: usize,
    out: *mut *mut LhcHypergraph,
) -> LhcStatus {
    guard(|| {
        let out = out!(out);
        if vertices.is_null() && edge_count > 0 {
            return fail(LhcStatus::NullPointer, "null pointer: vertices");
        }
        let flat = if edge_count == 0 { &[][..] } else { unsafe { std::slice::from_raw_parts(vertices, edge_count * k) } };
        let mut h = match KUniformHypergraph::empty(n, k) {
            Ok(h) => h,
            Err(e) => return from_error(e),
        };
        for chunk in flat.chunks(k.max(1)) {
            let Some(e) = loosehc::hypergraph::Edge::new(chunk.to_vec()) else {
                return fail(LhcStatus::InvalidArgument, format!("edge {chunk:?} repeats a vertex"));
            };
            if let Err(e) = h.insert(e) {
                return from_error(e);
            }
        }
        *out = LhcHypergraph::boxed(h);
        LhcStatus::Ok
    })
}

/// Releases a hypergraph handle. Null is ignored.
///
/// # Safety
/// `h` must be null or a handle returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lhc_hypergraph_free(h: *mut LhcHypergraph) {
    if !h.is_null() {
        drop(unsafe { Box::from_raw(h) });
    }
}

/// Vertex count, uniformity and edge count of a hypergraph.
///
/// # Safety
/// `h` must be a live handle; the out pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lhc_hypergraph_shape(
    h: *const LhcHypergraph,
    n: *mut usize,
    k: *mut usize,
    edge_count: *mut usize,
) -> LhcStatus {
    guard(|| {
        let h = deref!(h);
        let (n, k, edge_count) = (out!(n), out!(k), out!(edge_count));
        *n = h.inner.n();
        *k = h.inner.k();
        *edge_count = h.edges.len();
        LhcStatus::Ok
    })
}

/// Copies the `index`-th edge (in sorted order) into `vertices`, which must
/// hold at least `k` entries.
///
/// # Safety
/// `h` must be a live handle; `vertices` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn lhc_hypergraph_edge(
    h: *const LhcHypergraph,
    index: usize,
    vertices: *mut u32,
    len: usize,
) -> LhcStatus {
    guard(|| {
        let h = deref!(h);
        let Some(e) = h.edges.get(index) else {
            return fail(LhcStatus::OutOfRange, format!("edge index {index} out of range"));
        };
        copy_out(e, vertices, len)
    })
}

fn copy_out(src: &[u32], dst: *mut u32, len: usize) -> LhcStatus {
    if dst.is_null() {
        return fail(LhcStatus::NullPointer, "null pointer: output buffer");
    }
    if len < src.len() {
        return fail(LhcStatus::BufferTooSmall, format!("buffer holds {len}, need {}", src.len()));
    }
    unsafe { ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len()) };
    LhcStatus::Ok
}

/// Searches for a loose Hamilton cycle. On success `*found` tells whether
/// one exists and, if so, its cyclic vertex order is written to `order`
/// (which must hold `n` entries).
///
/// # Safety
/// `h` must be a live handle; `order` valid for `len` writes; `found` for a
/// write.
#[no_mangle]
pub unsafe extern "C" fn lhc_find_loose_hamilton(
    h: *const LhcHypergraph,
    order: *mut u32,
    len: usize,
    found: *mut bool,
) -> LhcStatus {
    guard(|| {
        let h = deref!(h);
        let found = out!(found);
        match find_loose_hamilton(&h.inner) {
            Ok(Some(c)) => {
                let s = copy_out(c.order(), order, len);
                *found = s == LhcStatus::Ok;
                s
            }
            Ok(None) => {
                *found = false;
                LhcStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Number of distinct loose Hamilton cycles.
///
/// # Safety
/// `h` must be a live handle; `count` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lhc_count_loose_hamilton(h: *const LhcHypergraph, count: *mut u64) -> LhcStatus {
    guard(|| {
        let h = deref!(h);
        let count = out!(count);
        match count_loose_hamilton(&h.inner) {
            Ok(c) => {
                *count = c;
                LhcStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Samples `Λ_d` and returns it as a simple hypergraph on `2m + 2κm`
/// vertices, with the number of rejected configurations.
///
/// # Safety
/// `out` must be valid for writes; `rejections` may be null.
#[no_mangle]
pub unsafe extern "C" fn lhc_lambda_sample(
    m: usize,
    d: usize,
    kappa: usize,
    seed: u64,
    out: *mut *mut LhcHypergraph,
    rejections: *mut u64,
) -> LhcStatus {
    guard(|| {
        let out = out!(out);
        match sample_lambda_d(m, d, kappa, seed) {
            Ok(s) => {
                if let Some(r) = unsafe { rejections.as_mut() } {
                    *r = s.rejections;
                }
                *out = LhcHypergraph::boxed(s.hypergraph());
                LhcStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// `g(x, y)` on the closed domain `0 ≤ x ≤ y ≤ 1−x`.
///
/// # Safety
/// `value` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lhc_g(x: f64, y: f64, d: u32, kappa: u32, value: *mut f64) -> LhcStatus {
    guard(|| {
        let value = out!(value);
        match analysis::g(x, y, d, kappa) {
            Ok(v) => {
                *value = v;
                LhcStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Gradient of `g` on the open domain.
///
/// # Safety
/// `gx` and `gy` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lhc_grad_g(x: f64, y: f64, d: u32, kappa: u32, gx: *mut f64, gy: *mut f64) -> LhcStatus {
    guard(|| {
        let (gx, gy) = (out!(gx), out!(gy));
        match analysis::grad_g(x, y, d, kappa) {
            Ok((a, b)) => {
                *gx = a;
                *gy = b;
                LhcStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Hessian of `g`, written row-major into `out[0..4]`.
///
/// # Safety
/// `out` must be valid for 4 writes.
#[no_mangle]
pub unsafe extern "C" fn lhc_hessian_g(x: f64, y: f64, d: u32, kappa: u32, out: *mut f64) -> LhcStatus {
    guard(|| {
        if out.is_null() {
            return fail(LhcStatus::NullPointer, "null pointer: out");
        }
        match analysis::hessian_g(x, y, d, kappa) {
            Ok(hm) => {
                let flat = [hm[0][0], hm[0][1], hm[1][0], hm[1][1]];
                unsafe { ptr::copy_nonoverlapping(flat.as_ptr(), out, 4) };
                LhcStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// `q = 1 − (1−p)^{1/exponent}`.
///
/// # Safety
/// `q` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lhc_split_probability(p: f64, exponent: u64, q: *mut f64) -> LhcStatus {
    guard(|| {
        let q = out!(q);
        if !(0.0..=1.0).contains(&p) || exponent == 0 {
            return fail(LhcStatus::InvalidArgument, format!("need p in [0, 1] and exponent ≥ 1, got {p}, {exponent}"));
        }
        *q = split_probability(p, exponent);
        LhcStatus::Ok
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lhc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
