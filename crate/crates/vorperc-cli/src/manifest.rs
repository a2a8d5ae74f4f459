//! The experiment manifest printed by `list-experiments`.

pub const MANIFEST: [(&str, &str); 20] = [
    ("sample", "§1.1 Poisson point process"),
    ("tessellate", "§1.1 Voronoi tessellation"),
    ("crossing", "§1.5 duality"),
    ("arms", "Prop 2.7 arm exponents"),
    ("hat-arms", "Def 1.5 hat events"),
    ("qm", "Prop 1.6 quasi-multiplicativity"),
    ("quenched-moment", "Theorem 1.7 quenched arm moments"),
    ("coupled-fourarm", "§3.3 coupled four-arm quantities"),
    ("halfplane-fourarm", "Appendix D"),
    ("noise", "Theorem 1.4 noise sensitivity"),
    ("pivotal-sum", "Appendix C"),
    ("xr-moments", "Appendix B"),
    ("spectral-tabulate", "§2.1 Fourier-Walsh expansion"),
    ("spectral-sample", "Definitions 2.1 and 2.2"),
    ("cov-identity", "Lemma 2.3"),
    ("spectral-pivotal", "Lemma 3.1"),
    ("lower-tail", "Theorems 2.5 and 2.6"),
    ("levy-tail", "§1.1 tail condition"),
    ("metric", "Appendix A"),
    ("suite", "acceptance battery"),
];

pub fn render() -> String {
    MANIFEST.iter().map(|(n, a)| format!("{n} → {a}\n")).collect()
}
