//! C interface to the `anglemin` library.
//!
//! Networks and fitted classifiers are opaque handles created and released
//! through this API. Every fallible call returns an [`AmStatus`]; on failure
//! [`am_last_error_message`] describes the most recent error on the calling
//! thread. Node indices and community labels are 0-based.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use anglemin::anglemin::{angle, build_projector, FittedClassifier, ProjectorStrategy};
use anglemin::{ClassifyError, EdgeVector, Graph, Network, Seed};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    MissingLabeledCommunity = 3,
    ZeroVector = 4,
    SpectralFailure = 5,
    Panic = 99,
}

/// Classifier family.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmMethod {
    /// Angles between raw edge vectors.
    AngleMin = 0,
    /// Angles after projecting onto labeled sums and an unlabeled projector.
    AngleMinPlus = 1,
    /// Angles using only edges among labeled nodes.
    AngleMinPlusSubnetwork = 2,
}

/// Projector used by `AngleMinPlus`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmProjector {
    PartitionIndicator = 0,
    DegreeWeightedPartition = 1,
    SpectralEmbedding = 2,
}

/// Outcome of one classification besides the angles.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AmClassification {
    pub label: usize,
    /// Nonzero when several communities share the smallest angle.
    pub tie: u8,
    /// Nonzero when the majority label of labeled neighbors was used.
    pub fallback: u8,
}

/// Observed network with partial labels.
pub struct AmNetwork {
    inner: Network,
}

/// Classifier fitted to a network.
pub struct AmClassifier {
    inner: FittedClassifier,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("NUL bytes removed"));
}

fn fail(status: AmStatus, message: impl Into<String>) -> AmStatus {
    set_error(message);
    status
}

fn classify_status(e: &ClassifyError) -> AmStatus {
    match e {
        ClassifyError::ZeroVector => AmStatus::ZeroVector,
        ClassifyError::MissingLabeledCommunity(_) => AmStatus::MissingLabeledCommunity,
        ClassifyError::InvalidInput(_) => AmStatus::InvalidInput,
        ClassifyError::Spectral(_) => AmStatus::SpectralFailure,
    }
}

fn from_classify(e: ClassifyError) -> AmStatus {
    fail(classify_status(&e), e.to_string())
}

fn guarded(f: impl FnOnce() -> AmStatus) -> AmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(AmStatus::Panic, "internal panic"),
    }
}

/// # Safety
/// `ptr` must be null or valid for `len` reads.
unsafe fn view<'a, T>(ptr: *const T, len: usize) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if ptr.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(ptr, len))
    }
}

/// Message of the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn am_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a NUL-terminated string.
#[no_mangle]
pub extern "C" fn am_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a network on `n` nodes from `n_edges` undirected edges
/// `(edges_u[i], edges_v[i])` and `n_labeled` labeled nodes
/// `labeled_nodes[i]` with communities `labeled_communities[i] < k`.
/// Self-loops and repeated edges are ignored.
///
/// # Safety
/// Array arguments must be valid for the stated lengths; `out` must be a
/// valid pointer. Release the result with [`am_network_free`].
#[no_mangle]
pub unsafe extern "C" fn am_network_new(
    n: usize,
    edges_u: *const usize,
    edges_v: *const usize,
    n_edges: usize,
    k: usize,
    labeled_nodes: *const usize,
    labeled_communities: *const usize,
    n_labeled: usize,
    out: *mut *mut AmNetwork,
) -> AmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(AmStatus::NullPointer, "out is null");
        }
        let (Some(eu), Some(ev), Some(ln), Some(lc)) = (
            view(edges_u, n_edges),
            view(edges_v, n_edges),
            view(labeled_nodes, n_labeled),
            view(labeled_communities, n_labeled),
        ) else {
            return fail(AmStatus::NullPointer, "array argument is null");
        };
        if let Some(&bad) = eu.iter().chain(ev).find(|&&v| v >= n) {
            return fail(AmStatus::InvalidInput, format!("edge endpoint {bad} outside 0..{n}"));
        }
        let (graph, _) = Graph::from_edges(n, eu.iter().copied().zip(ev.iter().copied()));
        let labeled = ln.iter().copied().zip(lc.iter().copied()).collect();
        match Network::new(graph, k, labeled) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(AmNetwork { inner }));
                AmStatus::Ok
            }
            Err(e) => from_classify(e),
        }
    })
}

/// # Safety
/// `net` must be null or a handle from [`am_network_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn am_network_free(net: *mut AmNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn am_network_num_nodes(net: *const AmNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.inner.n())
}

/// Fits a classifier. `projector` and `seed` only matter for
/// `AngleMinPlus`.
///
/// # Safety
/// `net` must be a live handle and `out` a valid pointer. Release the result
/// with [`am_classifier_free`].
#[no_mangle]
pub unsafe extern "C" fn am_classifier_fit(
    net: *const AmNetwork,
    method: AmMethod,
    projector: AmProjector,
    seed: u64,
    out: *mut *mut AmClassifier,
) -> AmStatus {
    guarded(|| {
        let Some(net) = net.as_ref() else {
            return fail(AmStatus::NullPointer, "network is null");
        };
        if out.is_null() {
            return fail(AmStatus::NullPointer, "out is null");
        }
        let strategy = match projector {
            AmProjector::PartitionIndicator => ProjectorStrategy::PartitionIndicator,
            AmProjector::DegreeWeightedPartition => ProjectorStrategy::DegreeWeightedPartition,
            AmProjector::SpectralEmbedding => ProjectorStrategy::SpectralEmbedding,
        };
        let fitted = match method {
            AmMethod::AngleMin => FittedClassifier::anglemin(&net.inner),
            AmMethod::AngleMinPlusSubnetwork => FittedClassifier::subnetwork(&net.inner),
            AmMethod::AngleMinPlus => build_projector(&net.inner, strategy, Seed(seed))
                .and_then(|h| FittedClassifier::angleminplus(&net.inner, h)),
        };
        match fitted {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(AmClassifier { inner }));
                AmStatus::Ok
            }
            Err(e) => from_classify(e),
        }
    })
}

/// Number of communities of a fitted classifier, or 0 for a null handle.
///
/// # Safety
/// `clf` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn am_classifier_num_communities(clf: *const AmClassifier) -> usize {
    clf.as_ref().map_or(0, |c| c.inner.layout().k())
}

/// Classifies a new node linked to the existing nodes `neighbors`. Writes
/// the result to `out` and, when `angles` is non-null, the angle to each
/// community (NaN where undefined) to `angles[0..K]`.
///
/// # Safety
/// `clf` must be a live handle, `neighbors` valid for `n_neighbors` reads,
/// `out` valid, and `angles` null or valid for K writes.
#[no_mangle]
pub unsafe extern "C" fn am_classifier_classify(
    clf: *const AmClassifier,
    neighbors: *const usize,
    n_neighbors: usize,
    out: *mut AmClassification,
    angles: *mut f64,
) -> AmStatus {
    guarded(|| {
        let Some(clf) = clf.as_ref() else {
            return fail(AmStatus::NullPointer, "classifier is null");
        };
        if out.is_null() {
            return fail(AmStatus::NullPointer, "out is null");
        }
        let Some(nb) = view(neighbors, n_neighbors) else {
            return fail(AmStatus::NullPointer, "neighbors is null");
        };
        let result = EdgeVector::from_neighbors(clf.inner.layout().n(), nb.to_vec()).and_then(|x| clf.inner.classify(&x));
        match result {
            Ok(res) => {
                *out = AmClassification {
                    label: res.label,
                    tie: u8::from(res.tie),
                    fallback: u8::from(res.fallback),
                };
                if !angles.is_null() {
                    slice::from_raw_parts_mut(angles, res.angles.len()).copy_from_slice(&res.angles);
                }
                AmStatus::Ok
            }
            Err(e) => from_classify(e),
        }
    })
}

/// # Safety
/// `clf` must be null or a handle from [`am_classifier_fit`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn am_classifier_free(clf: *mut AmClassifier) {
    if !clf.is_null() {
        drop(Box::from_raw(clf));
    }
}

/// Angle in radians between two nonzero vectors of length `len`.
///
/// # Safety
/// `u` and `v` must be valid for `len` reads and `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn am_angle(u: *const f64, v: *const f64, len: usize, out: *mut f64) -> AmStatus {
    guarded(|| {
        let (Some(u), Some(v)) = (view(u, len), view(v, len)) else {
            return fail(AmStatus::NullPointer, "vector is null");
        };
        if out.is_null() {
            return fail(AmStatus::NullPointer, "out is null");
        }
        match angle(u, v) {
            Ok(a) => {
                *out = a.radians();
                AmStatus::Ok
            }
            Err(e) => from_classify(e),
        }
    })
}
