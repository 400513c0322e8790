use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;
use thetalift_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(tl_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn lattice_round_trip() {
    let name = CString::new("E8").unwrap();
    let mut lat = ptr::null_mut();
    unsafe {
        assert_eq!(tl_lattice_builtin(name.as_ptr(), &mut lat), TlStatus::Ok);
        assert_eq!(tl_lattice_rank(lat), 8);
        let mut c = [0u64; 4];
        assert_eq!(tl_lattice_shell_counts(lat, 4, c.as_mut_ptr()), TlStatus::Ok);
        assert_eq!(c, [240, 2160, 6720, 17520]);
        assert_eq!(tl_lattice_shell_counts(lat, 0, c.as_mut_ptr()), TlStatus::InvalidArgument);
        tl_lattice_free(lat);
    }
    assert_eq!(last_error(), "max_norm must be at least 1");
}

#[test]
fn errors_map_to_codes() {
    let mut lat = ptr::null_mut();
    let bad = CString::new(r#"{"rank": 2, "gram": [[2, 1], [1, 2]]}"#).unwrap();
    unsafe {
        assert_eq!(tl_lattice_from_json(bad.as_ptr(), &mut lat), TlStatus::InvalidLattice);
        assert!(lat.is_null());
        assert_eq!(tl_lattice_builtin(ptr::null(), &mut lat), TlStatus::NullPointer);
        let mut v = 0.0;
        assert_eq!(tl_k_scaled(1.0, -1.0, &mut v), TlStatus::Domain);
        assert!(last_error().contains("y > 0"));
        assert_eq!(tl_k_scaled(0.0, 1.0, &mut v), TlStatus::Ok);
        assert!((v - 0.421024438240708333).abs() < 1e-12);
        assert!(last_error().is_empty());
        let mut f = ptr::null_mut();
        let form = CString::new(r#"{"r": 10.0, "parity": 3, "hecke": {"2": 0.5}}"#).unwrap();
        assert_eq!(tl_form_from_json(form.as_ptr(), &mut f), TlStatus::InvalidForm);
        tl_lattice_free(ptr::null_mut());
        tl_form_free(ptr::null_mut());
        tl_lift_free(ptr::null_mut());
        assert_eq!(tl_lattice_rank(ptr::null()), 0);
        assert!(tl_form_r(ptr::null()).is_nan());
    }
}

#[test]
fn lift_and_norm() {
    let (e8, even) = (CString::new("E8").unwrap(), CString::new("sample-even").unwrap());
    let (mut lat, mut form, mut lift) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(tl_lattice_builtin(e8.as_ptr(), &mut lat), TlStatus::Ok);
        assert_eq!(tl_form_sample(even.as_ptr(), &mut form), TlStatus::Ok);
        assert!((tl_form_r(form) - 27.55950270378148).abs() < 1e-12);
        assert_eq!(tl_lift_new(lat, form, &mut lift), TlStatus::Ok);
        tl_lattice_free(lat);
        let x = [0.0f64; 8];
        let mut v = TlLiftValue::default();
        assert_eq!(tl_lift_evaluate(lift, x.as_ptr(), 8, 2.0, 1e-10, &mut v), TlStatus::Ok);
        assert!(v.truncation_m >= 1 && v.tail_bound >= 0.0 && v.value_im == 0.0);
        assert!(((v.mantissa_re * v.ln_scale.exp()) / v.value_re - 1.0).abs() < 1e-12);
        assert_eq!(tl_lift_evaluate(lift, x.as_ptr(), 7, 2.0, 1e-10, &mut v), TlStatus::Domain);
        assert_eq!(tl_lift_evaluate(lift, x.as_ptr(), 8, 2.0, 0.0, &mut v), TlStatus::InvalidArgument);
        let mut ratio = 0.0;
        assert_eq!(tl_norm_ratio(form, 8, 100, &mut ratio), TlStatus::Ok);
        assert!(ratio > 0.0);
        assert_eq!(tl_norm_ratio(form, 12, 100, &mut ratio), TlStatus::Domain);
        tl_lift_free(lift);
        tl_form_free(form);
    }
}

#[test]
fn exponents() {
    let (mut a, mut b, mut c, mut d) = (0, 0, 0, 0);
    unsafe {
        assert_eq!(tl_bound_exponents(8, 7, 64, &mut a, &mut b, &mut c, &mut d), TlStatus::Ok);
        assert_eq!((a, b, c, d), (167, 295, 629, 295));
        assert_eq!(tl_bound_exponents(8, 1, 4, &mut a, &mut b, &mut c, &mut d), TlStatus::InvalidArgument);
    }
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(tl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

/// Compiles tests/smoke.c against the generated header and the static library.
#[test]
fn c_header_compiles_and_links() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let target = exe.parent().and_then(|p| p.parent()).unwrap();
    let lib = target.join("libthetalift_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let out = std::env::temp_dir().join(format!("thetalift_smoke_{}", std::process::id()));
    let st = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(st.success(), "cc failed");
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "smoke exited with {:?}", run.status.code());
}
