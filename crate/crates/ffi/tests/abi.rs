use std::ffi::{CStr, CString};
use std::ptr;

use seqlab_ffi::*;

fn last_error() -> String {
    let p = seqlab_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn generate(name: &str, n: usize) -> *mut SeqlabSequence {
    let name = CString::new(name).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { seqlab_sequence_generate(name.as_ptr(), n, &mut s) },
        SeqlabStatus::Ok
    );
    s
}

#[test]
fn system_values_and_reps() {
    let name = CString::new("fibonacci").unwrap();
    let mut sys = ptr::null_mut();
    unsafe {
        assert_eq!(seqlab_system_preset(name.as_ptr(), &mut sys), SeqlabStatus::Ok);
        let values: Vec<u64> = (0..6)
            .map(|i| {
                let mut v = 0;
                assert_eq!(seqlab_system_value(sys, i, &mut v), SeqlabStatus::Ok);
                v
            })
            .collect();
        assert_eq!(values, [1, 2, 3, 5, 8, 13]);

        let mut digits = [9u32; 8];
        let mut len = 0;
        assert_eq!(
            seqlab_system_rep(sys, 5, digits.as_mut_ptr(), digits.len(), &mut len),
            SeqlabStatus::Ok
        );
        assert_eq!(&digits[..len], &[1, 0, 0, 0]);
        assert_eq!(
            seqlab_system_rep(sys, 5, digits.as_mut_ptr(), 2, &mut len),
            SeqlabStatus::BufferTooSmall
        );
        assert_eq!(len, 4);

        let mut v = 0;
        assert_eq!(seqlab_system_value(sys, 200, &mut v), SeqlabStatus::OutOfRange);
        seqlab_system_free(sys);
    }
}

#[test]
fn sequences() {
    let s = generate("thue_morse", 16);
    unsafe {
        assert_eq!(seqlab_sequence_len(s), 16);
        let mut buf = [0u8; 32];
        let mut n = 0;
        assert_eq!(
            seqlab_sequence_copy(s, buf.as_mut_ptr(), buf.len(), &mut n),
            SeqlabStatus::Ok
        );
        assert_eq!(&buf[..n], &[0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0]);
        let mut b = 0;
        assert_eq!(seqlab_sequence_get(s, 3, &mut b), SeqlabStatus::Ok);
        assert_eq!(b, 0);
        assert_eq!(seqlab_sequence_get(s, 16, &mut b), SeqlabStatus::OutOfRange);
        assert!(last_error().contains("16"));
        seqlab_sequence_free(s);

        let mut t = ptr::null_mut();
        assert_eq!(
            seqlab_sequence_from_symbols([0u8, 2].as_ptr(), 2, &mut t),
            SeqlabStatus::InvalidArgument
        );
        assert_eq!(seqlab_sequence_len(ptr::null()), 0);
    }
}

#[test]
fn measures() {
    let ones = [1u8; 10];
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(
            seqlab_sequence_from_symbols(ones.as_ptr(), ones.len(), &mut s),
            SeqlabStatus::Ok
        );
        let mut r = SeqlabCorrelation::default();
        let mut d = [0usize; 2];
        assert_eq!(
            seqlab_correlation(s, 10, 2, 0, &mut r, d.as_mut_ptr()),
            SeqlabStatus::Ok
        );
        assert_eq!((r.value, r.m_star, r.order, d), (9, 9, 2, [0, 1]));
        seqlab_sequence_free(s);

        let t = generate("thue_morse", 400);
        assert_eq!(
            seqlab_correlation(t, 400, 4, 1000, &mut r, ptr::null_mut()),
            SeqlabStatus::BudgetExceeded
        );
        assert!(last_error().contains("budget"));
        seqlab_sequence_free(t);

        let p = generate("periodic:01", 10);
        let mut w = SeqlabWellDistribution::default();
        assert_eq!(seqlab_well_distribution(p, 10, 0, &mut w), SeqlabStatus::Ok);
        assert_eq!(w.value, 5);
        seqlab_sequence_free(p);
    }
}

#[test]
fn certificates() {
    let name = CString::new("thue_morse").unwrap();
    let mut c = SeqlabCertificate::default();
    let mut pos = [0u64; 2];
    unsafe {
        assert_eq!(
            seqlab_certify(name.as_ptr(), 2, 5, 0, &mut c, pos.as_mut_ptr()),
            SeqlabStatus::Ok
        );
        assert!(c.verified);
        assert_eq!((c.order, c.m, c.block), (2, 5, 32));
        assert_eq!(c.implied_n, pos[1] + 32);

        assert_eq!(
            seqlab_certify(name.as_ptr(), 2, 0, 1 << 12, &mut c, ptr::null_mut()),
            SeqlabStatus::Ok
        );
        assert!(c.implied_n <= 1 << 12);
        assert_eq!(
            seqlab_certify(name.as_ptr(), 3, 0, 1 << 12, &mut c, ptr::null_mut()),
            SeqlabStatus::InvalidArgument
        );
        let champ = CString::new("champernowne").unwrap();
        assert_eq!(
            seqlab_certify(champ.as_ptr(), 2, 3, 0, &mut c, ptr::null_mut()),
            SeqlabStatus::InvalidArgument
        );
    }
}

#[test]
fn null_and_bad_inputs() {
    let mut sys = ptr::null_mut();
    unsafe {
        assert_eq!(seqlab_system_preset(ptr::null(), &mut sys), SeqlabStatus::NullPointer);
        let bad = CString::new("no_such_system").unwrap();
        assert_eq!(
            seqlab_system_preset(bad.as_ptr(), &mut sys),
            SeqlabStatus::InvalidArgument
        );
        assert!(sys.is_null());
        assert!(!last_error().is_empty());
        let mut v = 0;
        assert_eq!(seqlab_system_value(ptr::null(), 0, &mut v), SeqlabStatus::NullPointer);
        seqlab_system_free(ptr::null_mut());
        seqlab_sequence_free(ptr::null_mut());
    }
    let s = generate("cantor", 9);
    assert!(seqlab_last_error().is_null());
    unsafe { seqlab_sequence_free(s) };
    let v = unsafe { CStr::from_ptr(seqlab_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
