use std::io::Cursor;

use serde_json::Value;

use tracepair::search::{
    certify_q, verify_certificate, Certificate, CertifyConfig, DEFAULT_BRUTE_FORCE_CAP,
};

const Q7: &str = include_str!("fixtures/q7.jsonl");

/// F_7[x]/(x^3 + m2 x^2 + m1 x + m0) with coefficient vectors low to high.
struct Cubic7 {
    m: [u64; 3],
}

impl Cubic7 {
    fn mul(&self, a: [u64; 3], b: [u64; 3]) -> [u64; 3] {
        let mut t = [0u64; 5];
        for i in 0..3 {
            for j in 0..3 {
                t[i + j] = (t[i + j] + a[i] * b[j]) % 7;
            }
        }
        for k in (3..5).rev() {
            let c = t[k];
            t[k] = 0;
            for j in 0..3 {
                t[k - 3 + j] = (t[k - 3 + j] + 7 * 7 - c * self.m[j]) % 7;
            }
        }
        [t[0], t[1], t[2]]
    }

    fn pow(&self, a: [u64; 3], e: u64) -> [u64; 3] {
        (0..e).fold([1, 0, 0], |acc, _| self.mul(acc, a))
    }

    fn order(&self, a: [u64; 3]) -> u64 {
        let mut y = a;
        let mut n = 1;
        while y != [1, 0, 0] {
            y = self.mul(y, a);
            n += 1;
        }
        n
    }
}

fn lines() -> Vec<Value> {
    Q7.lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn golden_q7_is_reproduced() {
    let cert = certify_q(7, &CertifyConfig::default()).unwrap();
    assert_eq!(cert.to_jsonl_string(), Q7);
}

#[test]
fn golden_q7_checks_by_hand() {
    let recs = lines();
    let header = &recs[0];
    assert_eq!(header["record"], "header");
    assert_eq!(header["status"], "full");
    let m: Vec<u64> = header["cubic_modulus"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d[0].as_u64().unwrap())
        .collect();
    let r = Cubic7 {
        m: [m[0], m[1], m[2]],
    };
    // x^{7^3} = x and x^7 != x, so the modulus is irreducible
    let x = [0, 1, 0];
    assert_eq!(r.pow(x, 343), x);
    assert_ne!(r.pow(x, 7), x);
    let mut seen = Vec::new();
    for w in &recs[1..] {
        assert_eq!(w["record"], "witness");
        let xi: Vec<u64> = w["xi_digits"]
            .as_array()
            .unwrap()
            .iter()
            .map(|d| d[0].as_u64().unwrap())
            .collect();
        let xi = [xi[0], xi[1], xi[2]];
        let a = w["a"].as_u64().unwrap();
        let tr = [xi, r.pow(xi, 7), r.pow(xi, 49)]
            .iter()
            .fold([0, 0, 0], |s, v| {
                [(s[0] + v[0]) % 7, (s[1] + v[1]) % 7, (s[2] + v[2]) % 7]
            });
        assert_eq!(tr, [a, 0, 0]);
        assert_eq!(r.order(xi), 342);
        let inv = r.pow(xi, 341);
        let sum = [
            (xi[0] + inv[0]) % 7,
            (xi[1] + inv[1]) % 7,
            (xi[2] + inv[2]) % 7,
        ];
        assert_eq!(r.order(sum), 342);
        seen.push(a);
    }
    assert_eq!(seen, (0..7).collect::<Vec<_>>());
}

fn parse(s: &str) -> Certificate {
    Certificate::read_jsonl(Cursor::new(s)).unwrap()
}

#[test]
fn tampered_certificates_are_rejected() {
    assert!(verify_certificate(&parse(Q7), DEFAULT_BRUTE_FORCE_CAP).is_ok());

    let mut recs = lines();
    let d = &mut recs[3]["xi_digits"][1][0];
    *d = Value::from((d.as_u64().unwrap() + 1) % 7);
    let flipped: String = recs.iter().map(|v| format!("{v}\n")).collect();
    assert!(verify_certificate(&parse(&flipped), DEFAULT_BRUTE_FORCE_CAP).is_err());

    let mut recs = lines();
    recs[2]["a"] = Value::from(5);
    let relabeled: String = recs.iter().map(|v| format!("{v}\n")).collect();
    assert!(verify_certificate(&parse(&relabeled), DEFAULT_BRUTE_FORCE_CAP).is_err());

    let mut recs = lines();
    recs[0]["factors"][2][0] = Value::from(17);
    let bad_header: String = recs.iter().map(|v| format!("{v}\n")).collect();
    assert!(verify_certificate(&parse(&bad_header), DEFAULT_BRUTE_FORCE_CAP).is_err());

    let missing: String = Q7.lines().take(7).map(|l| format!("{l}\n")).collect();
    assert!(verify_certificate(&parse(&missing), DEFAULT_BRUTE_FORCE_CAP).is_err());
}
