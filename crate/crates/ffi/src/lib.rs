//! C ABI for the mrcluster toolkit.
//!
//! Datasets and results are opaque handles owned by the caller and released
//! with their `_free` functions. Fallible calls return an [`MrcStatus`]; the
//! message of the most recent failure on the calling thread is available
//! from [`mrc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mrcluster::bench::{run_algorithm, Algorithm, AlgorithmParams};
use mrcluster::clusterers::{LloydConfig, LocalSearchConfig};
use mrcluster::datagen::{generate, DataGenConfig};
use mrcluster::pipelines::PipelineResult;
use mrcluster::{ClusterConfig, Dataset, Error, PointId, TimeMode};

pub const MRC_ALGORITHM_PARALLEL_LLOYD: u32 = 0;
pub const MRC_ALGORITHM_DIVIDE_LLOYD: u32 = 1;
pub const MRC_ALGORITHM_DIVIDE_LOCALSEARCH: u32 = 2;
pub const MRC_ALGORITHM_SAMPLING_LLOYD: u32 = 3;
pub const MRC_ALGORITHM_SAMPLING_LOCALSEARCH: u32 = 4;
pub const MRC_ALGORITHM_LOCALSEARCH: u32 = 5;
pub const MRC_ALGORITHM_GONZALEZ: u32 = 6;
pub const MRC_ALGORITHM_MR_KCENTER: u32 = 7;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MrcStatus {
    Ok = 0,
    /// Null pointer, out-of-range value or unsupported combination.
    InvalidArgument = 1,
    /// Explicit matrix that is not a metric.
    InvalidMetric = 2,
    /// A machine exceeded its memory cap.
    MemoryViolation = 3,
    /// Sampling stopped making progress.
    Stall = 4,
    /// Malformed dataset file.
    Parse = 5,
    Io = 6,
    /// Internal error; the library caught a panic.
    Internal = 7,
}

/// Opaque dataset handle.
pub struct MrcDataset {
    inner: Dataset,
}

/// Opaque result handle.
pub struct MrcResult {
    inner: PipelineResult,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MrcGenerateOptions {
    pub n: usize,
    pub k_true: usize,
    pub zipf_alpha: f64,
    /// Non-zero weights cluster i by i^-alpha instead of i^alpha.
    pub zipf_decreasing: i32,
    pub sigma: f64,
    pub dim: usize,
    pub seed: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MrcRunOptions {
    /// One of the `MRC_ALGORITHM_*` constants.
    pub algorithm: u32,
    pub k: usize,
    pub epsilon: f64,
    pub machines: usize,
    /// Zero means no cap.
    pub memory_cap_words: u64,
    pub seed: u64,
    /// Non-zero charges simulated time by words instead of wall time.
    pub deterministic_time: i32,
    pub lloyd_max_iterations: usize,
    pub lloyd_tolerance: f64,
    pub local_search_factor: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

fn status_of(err: &Error) -> MrcStatus {
    match err {
        Error::Usage(_) => MrcStatus::InvalidArgument,
        Error::InvalidMetric(_) => MrcStatus::InvalidMetric,
        Error::MemoryViolation { .. } => MrcStatus::MemoryViolation,
        Error::Stall { .. } => MrcStatus::Stall,
        Error::Parse { .. } => MrcStatus::Parse,
        Error::Io(_) => MrcStatus::Io,
    }
}

fn invalid(message: &str) -> Error {
    Error::Usage(message.to_string())
}

/// Runs `f`, converting errors and panics into a status.
fn guard<F>(f: F) -> MrcStatus
where
    F: FnOnce() -> Result<(), Error>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MrcStatus::Ok,
        Ok(Err(e)) => {
            let status = status_of(&e);
            set_error(e.to_string());
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_error(format!("internal error: {message}"));
            MrcStatus::Internal
        }
    }
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Error> {
    if out.is_null() {
        return Err(invalid("output pointer is null"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mrc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Loads a dataset file (euclidean `n d` header or explicit `n` header).
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mrc_dataset_load(path: *const c_char, out: *mut *mut MrcDataset) -> MrcStatus {
    guard(|| {
        if path.is_null() {
            return Err(invalid("path is null"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| invalid("path is not UTF-8"))?;
        let inner = Dataset::load(path)?;
        write_out(out, MrcDataset { inner })
    })
}

/// Euclidean dataset from `n * dim` row-major coordinates.
///
/// # Safety
/// `coords` must point to `n * dim` doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mrc_dataset_from_points(
    coords: *const f64,
    n: usize,
    dim: usize,
    out: *mut *mut MrcDataset,
) -> MrcStatus {
    guard(|| {
        let len = n.checked_mul(dim).ok_or_else(|| invalid("size overflow"))?;
        if coords.is_null() && len > 0 {
            return Err(invalid("coordinates are null"));
        }
        let values = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(coords, len).to_vec()
        };
        let inner = Dataset::euclidean(dim, values)?;
        write_out(out, MrcDataset { inner })
    })
}

/// Explicit-metric dataset from an `n * n` row-major distance matrix.
///
/// # Safety
/// `matrix` must point to `n * n` doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mrc_dataset_from_matrix(matrix: *const f64, n: usize, out: *mut *mut MrcDataset) -> MrcStatus {
    guard(|| {
        let len = n.checked_mul(n).ok_or_else(|| invalid("size overflow"))?;
        if matrix.is_null() && len > 0 {
            return Err(invalid("matrix is null"));
        }
        let values = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(matrix, len).to_vec()
        };
        let inner = Dataset::explicit(n, values)?;
        write_out(out, MrcDataset { inner })
    })
}

/// Default generator options: 10000 points, 25 clusters, alpha 0,
/// sigma 0.1, three dimensions, seed 0.
#[no_mangle]
pub extern "C" fn mrc_generate_options_default() -> MrcGenerateOptions {
    let d = DataGenConfig::default();
    MrcGenerateOptions {
        n: d.n,
        k_true: d.k_true,
        zipf_alpha: d.zipf_alpha,
        zipf_decreasing: d.zipf_decreasing as i32,
        sigma: d.sigma,
        dim: d.dim,
        seed: d.seed,
    }
}

/// Synthetic clustered dataset.
///
/// # Safety
/// `options` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mrc_dataset_generate(options: *const MrcGenerateOptions, out: *mut *mut MrcDataset) -> MrcStatus {
    guard(|| {
        let o = options.as_ref().ok_or_else(|| invalid("options are null"))?;
        if o.k_true == 0 || o.k_true > o.n || o.dim == 0 || !(o.sigma > 0.0 && o.sigma.is_finite()) {
            return Err(invalid("need 1 <= k_true <= n, dim >= 1 and sigma > 0"));
        }
        if !(o.zipf_alpha >= 0.0 && o.zipf_alpha.is_finite()) {
            return Err(invalid("zipf_alpha must be finite and non-negative"));
        }
        let inner = generate(&DataGenConfig {
            n: o.n,
            k_true: o.k_true,
            zipf_alpha: o.zipf_alpha,
            zipf_decreasing: o.zipf_decreasing != 0,
            sigma: o.sigma,
            dim: o.dim,
            seed: o.seed,
        });
        write_out(out, MrcDataset { inner })
    })
}

/// Number of points; zero for a null handle.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrc_dataset_len(dataset: *const MrcDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.len())
}

/// Writes the dataset in its file format.
///
/// # Safety
/// `dataset` must be a live handle and `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mrc_dataset_save(dataset: *const MrcDataset, path: *const c_char) -> MrcStatus {
    guard(|| {
        let d = dataset.as_ref().ok_or_else(|| invalid("dataset is null"))?;
        if path.is_null() {
            return Err(invalid("path is null"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| invalid("path is not UTF-8"))?;
        d.inner.save(path)
    })
}

/// # Safety
/// `dataset` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mrc_dataset_free(dataset: *mut MrcDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Distance between points `a` and `b`.
///
/// # Safety
/// `dataset` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mrc_dataset_distance(dataset: *const MrcDataset, a: u32, b: u32, out: *mut f64) -> MrcStatus {
    guard(|| {
        let d = dataset.as_ref().ok_or_else(|| invalid("dataset is null"))?;
        let out = out.as_mut().ok_or_else(|| invalid("output pointer is null"))?;
        *out = d.inner.distance(PointId(a), PointId(b))?;
        Ok(())
    })
}

/// Defaults: sampling local search, k 25, epsilon 0.1, 100 machines, no
/// memory cap, seed 0, wall-clock time.
#[no_mangle]
pub extern "C" fn mrc_run_options_default() -> MrcRunOptions {
    let lloyd = LloydConfig::default();
    MrcRunOptions {
        algorithm: MRC_ALGORITHM_SAMPLING_LOCALSEARCH,
        k: 25,
        epsilon: 0.1,
        machines: 100,
        memory_cap_words: 0,
        seed: 0,
        deterministic_time: 0,
        lloyd_max_iterations: lloyd.max_iterations,
        lloyd_tolerance: lloyd.convergence_tol,
        local_search_factor: LocalSearchConfig::default().improvement_factor,
    }
}

fn algorithm_of(code: u32) -> Option<Algorithm> {
    Some(match code {
        MRC_ALGORITHM_PARALLEL_LLOYD => Algorithm::ParallelLloyd,
        MRC_ALGORITHM_DIVIDE_LLOYD => Algorithm::DivideLloyd,
        MRC_ALGORITHM_DIVIDE_LOCALSEARCH => Algorithm::DivideLocalSearch,
        MRC_ALGORITHM_SAMPLING_LLOYD => Algorithm::SamplingLloyd,
        MRC_ALGORITHM_SAMPLING_LOCALSEARCH => Algorithm::SamplingLocalSearch,
        MRC_ALGORITHM_LOCALSEARCH => Algorithm::LocalSearch,
        MRC_ALGORITHM_GONZALEZ => Algorithm::Gonzalez,
        MRC_ALGORITHM_MR_KCENTER => Algorithm::MrKCenter,
        _ => return None,
    })
}

/// Runs an algorithm. The seed drives the cluster, the sampling coins and
/// the inner clusterer.
///
/// # Safety
/// `dataset` must be a live handle; `options` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mrc_run(
    dataset: *const MrcDataset,
    options: *const MrcRunOptions,
    out: *mut *mut MrcResult,
) -> MrcStatus {
    guard(|| {
        let d = dataset.as_ref().ok_or_else(|| invalid("dataset is null"))?;
        let o = options.as_ref().ok_or_else(|| invalid("options are null"))?;
        let algorithm = algorithm_of(o.algorithm).ok_or_else(|| invalid("unknown algorithm code"))?;
        if !(o.epsilon > 0.0 && o.epsilon < 1.0) {
            return Err(invalid("epsilon must be in (0, 1)"));
        }
        if !(o.local_search_factor > 0.0 && o.local_search_factor < 1.0) {
            return Err(invalid("local_search_factor must be in (0, 1)"));
        }
        let mut cluster = ClusterConfig::new(o.machines, o.seed);
        if o.memory_cap_words > 0 {
            cluster = cluster.with_memory_cap(o.memory_cap_words);
        }
        if o.deterministic_time != 0 {
            cluster = cluster.with_time_mode(TimeMode::WordCount);
        }
        let params = AlgorithmParams {
            k: o.k,
            epsilon: o.epsilon,
            cluster,
            lloyd: LloydConfig {
                max_iterations: o.lloyd_max_iterations,
                convergence_tol: o.lloyd_tolerance,
                seed: o.seed,
            },
            local_search: LocalSearchConfig {
                improvement_factor: o.local_search_factor,
                max_iterations: None,
                seed: o.seed,
            },
        };
        let inner = run_algorithm(algorithm, &d.inner, &params)?;
        write_out(out, MrcResult { inner })
    })
}

/// Objective over all points; NaN for a null handle.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrc_result_objective(result: *const MrcResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.inner.solution.objective)
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrc_result_center_count(result: *const MrcResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.solution.centers.len())
}

/// Copies the center ids, sorted ascending, into `out`.
///
/// # Safety
/// `result` must be a live handle and `out` must hold `capacity` ids.
#[no_mangle]
pub unsafe extern "C" fn mrc_result_centers(result: *const MrcResult, out: *mut u32, capacity: usize) -> MrcStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| invalid("result is null"))?;
        let centers = &r.inner.solution.centers;
        if capacity < centers.len() {
            return Err(invalid("buffer too small for the centers"));
        }
        if out.is_null() {
            return Err(invalid("output pointer is null"));
        }
        for (i, c) in centers.iter().enumerate() {
            *out.add(i) = c.0;
        }
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrc_result_rounds(result: *const MrcResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.trace.round_count())
}

/// Largest per-machine memory over all rounds, in words.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrc_result_peak_words(result: *const MrcResult) -> u64 {
    result.as_ref().map_or(0, |r| r.inner.trace.peak_memory())
}

/// Simulated time: per round the slowest machine, summed over rounds.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrc_result_sim_time(result: *const MrcResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.inner.trace.total_time())
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrc_result_sample_size(result: *const MrcResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.sample_size)
}

/// Per-machine trace as CSV; free with [`mrc_string_free`]. Null on a null
/// handle.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrc_result_trace_csv(result: *const MrcResult) -> *mut c_char {
    match result.as_ref() {
        Some(r) => CString::new(r.inner.trace.to_csv())
            .map(CString::into_raw)
            .unwrap_or(ptr::null_mut()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `result` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mrc_result_free(result: *mut MrcResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mrc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
