use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use anglemin_ffi::*;

fn two_cliques() -> (Vec<usize>, Vec<usize>) {
    let (mut u, mut v) = (Vec::new(), Vec::new());
    for block in 0..2 {
        for a in 0..6 {
            for b in (a + 1)..6 {
                u.push(block * 6 + a);
                v.push(block * 6 + b);
            }
        }
    }
    u.push(1);
    v.push(7);
    (u, v)
}

fn network(labeled: &[usize], communities: &[usize]) -> Result<*mut AmNetwork, AmStatus> {
    let (u, v) = two_cliques();
    let mut net = ptr::null_mut();
    let status = unsafe {
        am_network_new(12, u.as_ptr(), v.as_ptr(), u.len(), 2, labeled.as_ptr(), communities.as_ptr(), labeled.len(), &mut net)
    };
    if status == AmStatus::Ok {
        Ok(net)
    } else {
        Err(status)
    }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(am_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn classify_round_trip() {
    let net = network(&[0, 6], &[0, 1]).unwrap();
    assert_eq!(unsafe { am_network_num_nodes(net) }, 12);
    for method in [AmMethod::AngleMin, AmMethod::AngleMinPlus] {
        let mut clf = ptr::null_mut();
        assert_eq!(unsafe { am_classifier_fit(net, method, AmProjector::PartitionIndicator, 3, &mut clf) }, AmStatus::Ok);
        assert_eq!(unsafe { am_classifier_num_communities(clf) }, 2);
        let neighbors = [6usize, 8, 9, 10];
        let mut out = AmClassification::default();
        let mut angles = [0.0f64; 2];
        let status = unsafe { am_classifier_classify(clf, neighbors.as_ptr(), neighbors.len(), &mut out, angles.as_mut_ptr()) };
        assert_eq!(status, AmStatus::Ok);
        assert_eq!(out.label, 1, "{method:?}");
        assert_eq!(out.fallback, 0);
        assert!(angles[1] < angles[0]);
        unsafe { am_classifier_free(clf) };
    }
    unsafe { am_network_free(net) };
}

#[test]
fn zero_edges_use_fallback() {
    let net = network(&[0, 6], &[0, 1]).unwrap();
    let mut clf = ptr::null_mut();
    assert_eq!(unsafe { am_classifier_fit(net, AmMethod::AngleMin, AmProjector::PartitionIndicator, 0, &mut clf) }, AmStatus::Ok);
    let mut out = AmClassification::default();
    let status = unsafe { am_classifier_classify(clf, ptr::null(), 0, &mut out, ptr::null_mut()) };
    assert_eq!(status, AmStatus::Ok);
    assert_eq!((out.label, out.tie, out.fallback), (0, 1, 1));
    unsafe {
        am_classifier_free(clf);
        am_network_free(net);
    }
}

#[test]
fn errors_are_reported() {
    let net = network(&[0, 1], &[0, 0]).unwrap();
    let mut clf = ptr::null_mut();
    let status = unsafe { am_classifier_fit(net, AmMethod::AngleMin, AmProjector::PartitionIndicator, 0, &mut clf) };
    assert_eq!(status, AmStatus::MissingLabeledCommunity);
    assert!(last_error().contains("community 1"));
    unsafe { am_network_free(net) };

    assert_eq!(network(&[0], &[5]).unwrap_err(), AmStatus::InvalidInput);
    let status = unsafe { am_classifier_fit(ptr::null(), AmMethod::AngleMin, AmProjector::PartitionIndicator, 0, &mut clf) };
    assert_eq!(status, AmStatus::NullPointer);
    assert_eq!(unsafe { am_network_num_nodes(ptr::null()) }, 0);
}

#[test]
fn angle_function() {
    let u = [1.0, 1.0];
    let v = [1.0, 0.0];
    let mut out = 0.0;
    assert_eq!(unsafe { am_angle(u.as_ptr(), v.as_ptr(), 2, &mut out) }, AmStatus::Ok);
    assert!((out - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    let zero = [0.0, 0.0];
    assert_eq!(unsafe { am_angle(zero.as_ptr(), v.as_ptr(), 2, &mut out) }, AmStatus::ZeroVector);
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(am_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn target_dir() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    Some(exe.parent()?.parent()?.to_path_buf())
}

/// Compiles and runs a C program against the generated header and static
/// library when a C compiler is available.
#[test]
fn c_program_links_against_static_library() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(header_dir.join("anglemin.h").exists());
    let Some(lib_dir) = target_dir().filter(|d| d.join("libanglemin_ffi.a").exists()) else {
        eprintln!("static library not found; skipping C link test");
        return;
    };
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping C link test");
        return;
    }
    let out_dir = tempfile_dir();
    let exe = out_dir.join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests").join("smoke.c"))
        .arg("-I")
        .arg(&header_dir)
        .arg(lib_dir.join("libanglemin_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("cc runs");
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&exe).output().expect("smoke binary runs");
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("label=1"));
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("anglemin-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
