use std::ffi::{CStr, CString};
use std::ptr;

use kacfusion_ffi::*;

fn last_error() -> String {
    let p = kf_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn rootsys(t: &str) -> *mut KfRootSystem {
    let name = CString::new(t).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { kf_rootsys_new(name.as_ptr(), &mut h) }, KfStatus::Ok);
    h
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { kf_string_free(p) };
    s
}

#[test]
fn root_system_handle() {
    let h = rootsys("G2");
    unsafe {
        assert_eq!(kf_rootsys_dim(h), 2);
        let mut hv = 0;
        assert_eq!(kf_rootsys_dual_coxeter(h, &mut hv), KfStatus::Ok);
        assert_eq!(hv, 4);
        let mut js = ptr::null_mut();
        assert_eq!(kf_rootsys_to_json(h, &mut js), KfStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(js)).unwrap();
        assert_eq!(v["twisted_type"], "D4^(3)");
        kf_rootsys_free(h);
    }
}

#[test]
fn bad_type_sets_error() {
    let name = CString::new("Q7").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { kf_rootsys_new(name.as_ptr(), &mut h) }, KfStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains("Q7"));
    assert_eq!(unsafe { kf_rootsys_new(ptr::null(), &mut h) }, KfStatus::NullPointer);
}

#[test]
fn smatrix_entries_are_unitary() {
    let rs = rootsys("A1");
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(kf_smatrix_new(rs, 5, 2, &mut s), KfStatus::Ok);
        let n = kf_smatrix_dim(s);
        assert_eq!(n, 8);
        for i in 0..n {
            let mut norm = 0.0;
            for j in 0..n {
                let (mut re, mut im) = (0.0, 0.0);
                assert_eq!(kf_smatrix_entry(s, i, j, &mut re, &mut im), KfStatus::Ok);
                norm += re * re + im * im;
            }
            assert!((norm - 1.0).abs() < 1e-12);
        }
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(kf_smatrix_entry(s, n, 0, &mut re, &mut im), KfStatus::OutOfRange);
        let mut lab = ptr::null_mut();
        assert_eq!(kf_smatrix_label(s, 0, &mut lab), KfStatus::Ok);
        assert!(take_string(lab).starts_with('['));
        let mut js = ptr::null_mut();
        assert_eq!(kf_smatrix_to_json(s, &mut js), KfStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(js)).unwrap();
        assert_eq!(v["kind"], "principal");
        kf_smatrix_free(s);
        assert_eq!(kf_smatrix_new(rs, 4, 2, &mut s), KfStatus::InvalidArgument);
        kf_rootsys_free(rs);
    }
}

#[test]
fn ising_fusion_through_the_abi() {
    let rs = rootsys("A1");
    unsafe {
        let mut w = ptr::null_mut();
        assert_eq!(kf_wsmatrix_new(rs, 3, 4, &mut w), KfStatus::Ok);
        assert_eq!(kf_smatrix_dim(w), 3);
        kf_smatrix_free(w);
        let mut f = ptr::null_mut();
        assert_eq!(kf_fusion_new(rs, 3, 4, &mut f), KfStatus::Ok);
        let n = kf_fusion_dim(f);
        assert_eq!(n, 3);
        let mut total = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut v = -1;
                    assert_eq!(kf_fusion_entry(f, a, b, c, &mut v), KfStatus::Ok);
                    assert!(v >= 0);
                    total += v;
                }
            }
        }
        // Five products involve the vacuum; σσ = 1 + ε, σε = εσ = σ, εε = 1.
        assert_eq!(total, 5 + 2 + 2 + 1);
        let mut js = ptr::null_mut();
        assert_eq!(kf_fusion_to_json(f, &mut js), KfStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(js)).unwrap();
        assert!(v["max_rounding_error"].as_f64().unwrap() < 1e-6);
        kf_fusion_free(f);
        let mut g = ptr::null_mut();
        assert_eq!(kf_fusion_integrable_new(rs, 1, &mut g), KfStatus::Ok);
        assert_eq!(kf_fusion_dim(g), 2);
        kf_fusion_free(g);
        assert_eq!(kf_fusion_integrable_new(rs, -1, &mut g), KfStatus::InvalidArgument);
        kf_rootsys_free(rs);
    }
}

#[test]
fn null_handles_are_rejected() {
    unsafe {
        assert_eq!(kf_smatrix_dim(ptr::null()), 0);
        assert_eq!(kf_fusion_dim(ptr::null()), 0);
        let mut x = 0i64;
        assert_eq!(kf_fusion_entry(ptr::null(), 0, 0, 0, &mut x), KfStatus::NullPointer);
        let rs = rootsys("A1");
        assert_eq!(kf_rootsys_dual_coxeter(rs, ptr::null_mut()), KfStatus::NullPointer);
        kf_rootsys_free(rs);
        kf_rootsys_free(ptr::null_mut());
        kf_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/kacfusion.h");
    let src = include_str!("../src/lib.rs");
    let exports: Vec<&str> =
        src.lines().filter_map(|l| l.split("extern \"C\" fn ").nth(1)).filter_map(|l| l.split('(').next()).collect();
    assert!(exports.len() >= 15);
    for f in exports {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("KF_STATUS_HYPOTHESIS_VIOLATED = 5"));
}

#[test]
fn header_compiles_as_c() {
    let Ok(dir) = std::env::var("CARGO_MANIFEST_DIR") else { return };
    let src = std::env::temp_dir().join(format!("kf_header_{}.c", std::process::id()));
    std::fs::write(
        &src,
        "#include \"kacfusion.h\"\nint main(void) { KfRootSystem *h = 0; KfStatus s = kf_rootsys_new(\"A1\", &h); kf_rootsys_free(h); return (int)s; }\n",
    )
    .unwrap();
    let out = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(format!("{dir}/include"))
        .arg(&src)
        .output();
    let _ = std::fs::remove_file(&src);
    match out {
        Ok(o) => assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr)),
        Err(_) => eprintln!("no C compiler; skipped"),
    }
}
