use super::*;

fn cfg(count: usize, inject_failure: bool) -> SuiteConfig {
    SuiteConfig { seed: 7, count, inject_failure }
}

#[test]
fn builtin_names() {
    let r = Registry::builtin();
    assert_eq!(
        r.names(),
        vec!["norms", "riesz-half", "riesz-line", "lebesgue", "sequence", "sobolev", "hilbert", "convex"]
    );
    assert!(r.get("nope").is_none());
    assert!(r.run("nope", &cfg(1, false)).is_err());
}

#[test]
fn every_suite_passes() {
    let report = Registry::builtin().run(ALL, &cfg(40, false)).unwrap();
    for s in &report.suites {
        for p in &s.properties {
            assert!(p.passed, "{}/{}: {:?}", s.suite, p.name, p);
        }
    }
    assert!(report.passed);
}

#[test]
fn injected_failure_flips_one_property() {
    let report = Registry::builtin().run("norms", &cfg(20, true)).unwrap();
    assert!(!report.passed);
    let failed: Vec<_> = report.suites[0].properties.iter().filter(|p| !p.passed).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0].tolerance, -1.0);
    assert!(failed[0].witness.is_some());
}

#[test]
fn reports_are_deterministic() {
    let r = Registry::builtin();
    let a = crate::report::to_stable_json(&r.run("riesz-half", &cfg(30, false)).unwrap()).unwrap();
    let b = crate::report::to_stable_json(&r.run("riesz-half", &cfg(30, false)).unwrap()).unwrap();
    assert_eq!(a, b);
}

struct Custom;

impl PropertySuite for Custom {
    fn name(&self) -> &'static str {
        "custom"
    }

    fn summary(&self) -> &'static str {
        "test"
    }

    fn run(&self, ctx: &mut Context<'_>) {
        ctx.single("always", 0.0, || Ok(Observation::new(0.0, ())));
    }
}

#[test]
fn custom_suite_registers() {
    let mut r = Registry::new();
    r.register(Box::new(Custom));
    r.register(Box::new(Custom));
    assert_eq!(r.names(), vec!["custom"]);
    assert!(r.run(ALL, &cfg(1, false)).unwrap().passed);
}
