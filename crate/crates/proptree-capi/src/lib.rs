//! C ABI for the property-tree testing framework: opaque handles, integer
//! status codes, and caller-freed strings, so other languages can build
//! properties from callbacks, run the campaign loops, and read reports.
//!
//! Handles returned by `*_new`/`*_check`/run functions own their payload
//! and must be released with the matching `*_free`. Callback `user_data`
//! pointers are passed through untouched; when a property built from
//! callbacks is handed to the parallel runner, the callbacks and their
//! `user_data` must be safe to invoke from multiple threads.

use std::ffi::{c_char, c_void, CStr, CString};

use proptree::bench::{run_campaign, CampaignConfig};
use proptree::gen::{default_size, int_shrinker, int_step_mutator, sized_int_action, GenAction};
use proptree::prop::{Annotations, PropTree};
use proptree::report::RunnerReport;
use proptree::rng::SplitMix64;
use proptree::runner::{run_loop, RunOpts};
use proptree::{Env, Value};

/// Result codes for every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbtStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    DuplicateName = 3,
    InvalidArgument = 4,
    MissingBinding = 5,
    RunFailed = 6,
}

/// Opaque property builder; assembles quantifiers outermost-first.
#[repr(C)]
pub struct PbtBuilder {
    _private: [u8; 0],
}

/// Opaque reified property.
#[repr(C)]
pub struct PbtProp {
    _private: [u8; 0],
}

/// Opaque campaign report.
#[repr(C)]
pub struct PbtReport {
    _private: [u8; 0],
}

/// Borrowed view of the environment inside callbacks; never freed by the
/// caller.
#[repr(C)]
pub struct PbtEnv {
    _private: [u8; 0],
}

/// Borrowed deterministic random source inside generator callbacks.
#[repr(C)]
pub struct PbtRng {
    _private: [u8; 0],
}

/// Generator callback for an i64 variable: may read earlier bindings from
/// `env` and must draw randomness only from `rng`. Null is rejected.
pub type PbtGenI64 = Option<
    unsafe extern "C" fn(
        env: *const PbtEnv,
        rng: *mut PbtRng,
        size: u64,
        user_data: *mut c_void,
    ) -> i64,
>;

/// Boolean predicate over the environment, used for preconditions and the
/// final check. Null is rejected.
pub type PbtPredicate =
    Option<unsafe extern "C" fn(env: *const PbtEnv, user_data: *mut c_void) -> bool>;

type GenFnRaw =
    unsafe extern "C" fn(*const PbtEnv, *mut PbtRng, u64, *mut c_void) -> i64;
type PredFnRaw = unsafe extern "C" fn(*const PbtEnv, *mut c_void) -> bool;

#[derive(Clone, Copy)]
struct CCallback<F> {
    f: F,
    data: *mut c_void,
}

// Callers promise their callbacks tolerate the threads we document.
unsafe impl<F> Send for CCallback<F> {}
unsafe impl<F> Sync for CCallback<F> {}

// Accessors keep closures capturing the whole wrapper, not its raw fields.
impl CCallback<GenFnRaw> {
    unsafe fn generate(&self, env: *const PbtEnv, rng: *mut PbtRng, size: u64) -> i64 {
        (self.f)(env, rng, size, self.data)
    }
}

impl CCallback<PredFnRaw> {
    unsafe fn test(&self, env: *const PbtEnv) -> bool {
        (self.f)(env, self.data)
    }
}

enum Step {
    Forall { name: String, annotations: Annotations },
    Implies(CCallback<PredFnRaw>),
}

struct BuilderInner {
    steps: Vec<Step>,
}

fn builder_ref<'a>(b: *mut PbtBuilder) -> Option<&'a mut BuilderInner> {
    unsafe { (b as *mut BuilderInner).as_mut() }
}

fn prop_ref<'a>(p: *const PbtProp) -> Option<&'a PropTree> {
    unsafe { (p as *const PropTree).as_ref() }
}

fn report_ref<'a>(r: *const PbtReport) -> Option<&'a RunnerReport> {
    unsafe { (r as *const RunnerReport).as_ref() }
}

fn env_ref<'a>(e: *const PbtEnv) -> Option<&'a Env> {
    unsafe { (e as *const Env).as_ref() }
}

fn take_str(s: *const c_char) -> Result<String, PbtStatus> {
    if s.is_null() {
        return Err(PbtStatus::NullArgument);
    }
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map(str::to_string)
        .map_err(|_| PbtStatus::InvalidUtf8)
}

fn int_annotations() -> Annotations {
    Annotations::new()
        .mutator_fn(int_step_mutator(1))
        .shrinker_fn(int_shrinker())
        .printer(|_env, v| v.as_int().unwrap_or_default().to_string())
}

/// Creates an empty property builder.
#[no_mangle]
pub extern "C" fn pbt_builder_new() -> *mut PbtBuilder {
    Box::into_raw(Box::new(BuilderInner { steps: Vec::new() })) as *mut PbtBuilder
}

/// Releases a builder and any quantifiers still staged in it.
///
/// # Safety
/// `b` must be null or a pointer from [`pbt_builder_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pbt_builder_free(b: *mut PbtBuilder) {
    if !b.is_null() {
        drop(unsafe { Box::from_raw(b as *mut BuilderInner) });
    }
}

fn push_forall(b: *mut PbtBuilder, name: *const c_char, annotations: Annotations) -> PbtStatus {
    let Some(builder) = builder_ref(b) else {
        return PbtStatus::NullArgument;
    };
    let name = match take_str(name) {
        Ok(n) if !n.is_empty() => n,
        Ok(_) => return PbtStatus::InvalidArgument,
        Err(status) => return status,
    };
    let duplicate = builder
        .steps
        .iter()
        .any(|s| matches!(s, Step::Forall { name: n, .. } if *n == name));
    if duplicate {
        return PbtStatus::DuplicateName;
    }
    builder.steps.push(Step::Forall { name, annotations });
    PbtStatus::Ok
}

/// Quantifies over an i64 drawn uniformly from `[-size, size]`, with the
/// built-in step mutator and halving shrinker attached.
///
/// # Safety
/// `b` must be a live builder; `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pbt_builder_forall_i64_sized(
    b: *mut PbtBuilder,
    name: *const c_char,
) -> PbtStatus {
    push_forall(b, name, int_annotations().generator_action(sized_int_action()))
}

/// Quantifies over an i64 produced by a caller-supplied generator.
///
/// # Safety
/// `b` must be a live builder and `name` a NUL-terminated string. The
/// callback and its `user_data` must stay valid for the property's
/// lifetime, and be thread-safe if the property is run in parallel.
#[no_mangle]
pub unsafe extern "C" fn pbt_builder_forall_i64(
    b: *mut PbtBuilder,
    name: *const c_char,
    gen: PbtGenI64,
    user_data: *mut c_void,
) -> PbtStatus {
    let Some(gen) = gen else {
        return PbtStatus::NullArgument;
    };
    let callback = CCallback { f: gen, data: user_data };
    let annotations = int_annotations().generator(move |env: &Env| {
        let env = env.clone();
        GenAction::new(move |rng: &mut SplitMix64, size| {
            let value = unsafe {
                callback.generate(
                    &env as *const Env as *const PbtEnv,
                    rng as *mut SplitMix64 as *mut PbtRng,
                    size,
                )
            };
            Value::int(value)
        })
    });
    push_forall(b, name, annotations)
}

/// Guards the rest of the property behind a precondition; failing draws
/// are discarded.
///
/// # Safety
/// Same contract as [`pbt_builder_forall_i64`].
#[no_mangle]
pub unsafe extern "C" fn pbt_builder_implies(
    b: *mut PbtBuilder,
    pred: PbtPredicate,
    user_data: *mut c_void,
) -> PbtStatus {
    let Some(builder) = builder_ref(b) else {
        return PbtStatus::NullArgument;
    };
    let Some(pred) = pred else {
        return PbtStatus::NullArgument;
    };
    builder.steps.push(Step::Implies(CCallback {
        f: pred,
        data: user_data,
    }));
    PbtStatus::Ok
}

/// Terminates the spine with the final predicate and yields the property.
/// The builder's staged quantifiers are consumed; the builder itself must
/// still be freed.
///
/// # Safety
/// Same contract as [`pbt_builder_forall_i64`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pbt_builder_check(
    b: *mut PbtBuilder,
    pred: PbtPredicate,
    user_data: *mut c_void,
    out: *mut *mut PbtProp,
) -> PbtStatus {
    if out.is_null() {
        return PbtStatus::NullArgument;
    }
    let Some(builder) = builder_ref(b) else {
        return PbtStatus::NullArgument;
    };
    let Some(pred) = pred else {
        return PbtStatus::NullArgument;
    };
    let callback = CCallback {
        f: pred,
        data: user_data,
    };
    let mut tree = proptree::check(move |env: &Env| unsafe {
        callback.test(env as *const Env as *const PbtEnv)
    });
    for step in builder.steps.drain(..).rev() {
        tree = match step {
            Step::Forall { name, annotations } => {
                match proptree::forall(name, annotations, tree) {
                    Ok(t) => t,
                    Err(_) => return PbtStatus::DuplicateName,
                }
            }
            Step::Implies(callback) => proptree::implies(
                move |env: &Env| unsafe { callback.test(env as *const Env as *const PbtEnv) },
                tree,
            ),
        };
    }
    unsafe { *out = Box::into_raw(Box::new(tree)) as *mut PbtProp };
    PbtStatus::Ok
}

/// # Safety
/// `p` must be null or a pointer from [`pbt_builder_check`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pbt_prop_free(p: *mut PbtProp) {
    if !p.is_null() {
        drop(unsafe { Box::from_raw(p as *mut PropTree) });
    }
}

/// Reads an i64 binding inside a callback.
///
/// # Safety
/// `env` must be the pointer passed to the running callback; `name` a
/// NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pbt_env_get_i64(
    env: *const PbtEnv,
    name: *const c_char,
    out: *mut i64,
) -> PbtStatus {
    let Some(env) = env_ref(env) else {
        return PbtStatus::NullArgument;
    };
    if out.is_null() {
        return PbtStatus::NullArgument;
    }
    let name = match take_str(name) {
        Ok(n) => n,
        Err(status) => return status,
    };
    match env.lookup(&name).and_then(Value::as_int) {
        Some(v) => {
            unsafe { *out = v };
            PbtStatus::Ok
        }
        None => PbtStatus::MissingBinding,
    }
}

/// Number of bindings currently in the environment.
///
/// # Safety
/// `env` must be null or the pointer passed to the running callback.
#[no_mangle]
pub unsafe extern "C" fn pbt_env_len(env: *const PbtEnv) -> usize {
    env_ref(env).map_or(0, Env::len)
}

/// Deterministic uniform draw in `[0, bound)`; returns 0 when `bound` is 0
/// or `rng` is null.
///
/// # Safety
/// `rng` must be null or the pointer passed to the running callback.
#[no_mangle]
pub unsafe extern "C" fn pbt_rng_next_below(rng: *mut PbtRng, bound: u64) -> u64 {
    let Some(rng) = (unsafe { (rng as *mut SplitMix64).as_mut() }) else {
        return 0;
    };
    if bound == 0 {
        return 0;
    }
    rng.next_below(bound)
}

fn report_out(report: RunnerReport, out: *mut *mut PbtReport) -> PbtStatus {
    unsafe { *out = Box::into_raw(Box::new(report)) as *mut PbtReport };
    PbtStatus::Ok
}

/// Runs the classic generate-and-check loop for up to `fuel` trials.
///
/// # Safety
/// `prop` must be a live property; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pbt_run_loop(
    prop: *const PbtProp,
    fuel: u64,
    seed: u64,
    out: *mut *mut PbtReport,
) -> PbtStatus {
    let Some(prop) = prop_ref(prop) else {
        return PbtStatus::NullArgument;
    };
    if out.is_null() {
        return PbtStatus::NullArgument;
    }
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
        let mut rng = SplitMix64::new(seed);
        run_loop(fuel, prop, &mut rng, default_size)
    }));
    match outcome {
        Ok(Ok(report)) => report_out(report, out),
        _ => PbtStatus::RunFailed,
    }
}

/// Runs up to `tests` trials across `workers` threads. The property's
/// callbacks are invoked concurrently.
///
/// # Safety
/// As [`pbt_run_loop`]; every callback in the property must additionally
/// tolerate concurrent invocation.
#[no_mangle]
pub unsafe extern "C" fn pbt_parallel_run_loop(
    prop: *const PbtProp,
    tests: u64,
    workers: usize,
    seed: u64,
    out: *mut *mut PbtReport,
) -> PbtStatus {
    let Some(prop) = prop_ref(prop) else {
        return PbtStatus::NullArgument;
    };
    if out.is_null() || workers == 0 {
        return if out.is_null() {
            PbtStatus::NullArgument
        } else {
            PbtStatus::InvalidArgument
        };
    }
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
        proptree::parallel::parallel_run_loop(tests, prop, workers, seed, &RunOpts::default())
    }));
    match outcome {
        Ok(Ok(report)) => report_out(report, out),
        _ => PbtStatus::RunFailed,
    }
}

/// # Safety
/// `r` must be null or a live report pointer.
#[no_mangle]
pub unsafe extern "C" fn pbt_report_foundbug(r: *const PbtReport) -> bool {
    report_ref(r).is_some_and(|r| r.foundbug)
}

/// # Safety
/// `r` must be null or a live report pointer.
#[no_mangle]
pub unsafe extern "C" fn pbt_report_passed(r: *const PbtReport) -> u64 {
    report_ref(r).map_or(0, |r| r.passed)
}

/// # Safety
/// `r` must be null or a live report pointer.
#[no_mangle]
pub unsafe extern "C" fn pbt_report_discards(r: *const PbtReport) -> u64 {
    report_ref(r).map_or(0, |r| r.discards)
}

/// The printed counterexample, or null when no bug was found. The caller
/// owns the string and releases it with `pbt_string_free`.
///
/// # Safety
/// `r` must be null or a live report pointer.
#[no_mangle]
pub unsafe extern "C" fn pbt_report_counterexample(r: *const PbtReport) -> *mut c_char {
    let Some(report) = report_ref(r) else {
        return std::ptr::null_mut();
    };
    match &report.counterexample {
        Some(text) => CString::new(text.clone())
            .map(CString::into_raw)
            .unwrap_or(std::ptr::null_mut()),
        None => std::ptr::null_mut(),
    }
}

/// # Safety
/// `r` must be null or a report pointer not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pbt_report_free(r: *mut PbtReport) {
    if !r.is_null() {
        drop(unsafe { Box::from_raw(r as *mut RunnerReport) });
    }
}

/// Frees strings returned by this library.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pbt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Runs a full benchmark campaign described by a JSON configuration (the
/// same schema the `pbt` command line uses) and returns the JSON-lines
/// trial records. On failure the output string holds the error message.
/// Either way the caller frees it with `pbt_string_free`.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pbt_campaign_run_json(
    config_json: *const c_char,
    out: *mut *mut c_char,
) -> PbtStatus {
    if out.is_null() {
        return PbtStatus::NullArgument;
    }
    let give = |text: String, status: PbtStatus| -> PbtStatus {
        let c = CString::new(text).unwrap_or_default();
        unsafe { *out = c.into_raw() };
        status
    };
    let config_text = match take_str(config_json) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let config: CampaignConfig = match serde_json::from_str(&config_text) {
        Ok(c) => c,
        Err(e) => return give(format!("bad config: {e}"), PbtStatus::InvalidArgument),
    };
    match run_campaign(&config) {
        Ok(outcome) => {
            let mut lines = String::new();
            for record in &outcome.records {
                lines.push_str(&record.to_json());
                lines.push('\n');
            }
            give(lines, PbtStatus::Ok)
        }
        Err(e) => give(e.to_string(), PbtStatus::RunFailed),
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn pbt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
