/// A result exercised by the lab, the subcommand that checks it and the
/// gates that must pass before the check runs.
pub struct TheoremRow {
    pub result: &'static str,
    pub subcommand: &'static str,
    pub gates: &'static str,
}

pub const THEOREMS: [TheoremRow; 12] = [
    TheoremRow {
        result: "pointwise ergodic theorem along tempered sequences",
        subcommand: "birkhoff",
        gates: "tempered",
    },
    TheoremRow {
        result: "set-function limit along tiling sequences equals the infimum over tiles",
        subcommand: "limit-setfn (limit_mode=tiling)",
        gates: "subadditive, invariant, tiling",
    },
    TheoremRow {
        result: "set-function limit for strongly subadditive functions equals the infimum over finite sets",
        subcommand: "limit-setfn (limit_mode=strong)",
        gates: "strongly_subadditive, invariant",
    },
    TheoremRow {
        result: "greedy covering count",
        subcommand: "maximal",
        gates: "nonnegative, supadditive, invariant, tempelman",
    },
    TheoremRow {
        result: "ergodic decomposition of nu(D)",
        subcommand: "decompose",
        gates: "subadditive, invariant, tiling or strongly_subadditive",
    },
    TheoremRow {
        result: "maximal inequality for tiling sequences or strongly supadditive families",
        subcommand: "maximal",
        gates: "nonnegative, supadditive, invariant, tempelman, tiling or strongly_supadditive",
    },
    TheoremRow {
        result: "limsup identity for bi-invariant families",
        subcommand: "limsup (limsup_mode=bi_invariant)",
        gates: "subadditive, invariant, bi_invariant, tempered, tiling",
    },
    TheoremRow {
        result: "limsup identity for strongly subadditive families",
        subcommand: "limsup (limsup_mode=strongly_subadditive)",
        gates: "strongly_subadditive, invariant, tempered",
    },
    TheoremRow {
        result: "subadditive ergodic theorem along self-similar tilings",
        subcommand: "converge",
        gates: "subadditive, invariant, self_similar_tiling, tempelman, condition_b, one of bi_invariant / strongly_subadditive / subgroup_product",
    },
    TheoremRow {
        result: "subadditive ergodic theorem with nu(D) = -inf via truncation",
        subcommand: "converge (ladder)",
        gates: "as converge, plus subadditive and invariant truncations",
    },
    TheoremRow {
        result: "subadditive ergodic theorem on Z^m, sums of finite groups and the direct sum of Z",
        subcommand: "converge",
        gates: "as converge, with the built-in box or prefix sequences",
    },
    TheoremRow {
        result: "maximal inequality on Z",
        subcommand: "maximal",
        gates: "nonnegative, supadditive, invariant, tempelman (M = 2)",
    },
];

pub fn render() -> String {
    let w0 = THEOREMS.iter().map(|r| r.result.len()).max().unwrap();
    let w1 = THEOREMS.iter().map(|r| r.subcommand.len()).max().unwrap();
    let mut out = format!("{:w0$}  {:w1$}  {}\n", "result", "subcommand", "gates");
    for r in &THEOREMS {
        out.push_str(&format!("{:w0$}  {:w1$}  {}\n", r.result, r.subcommand, r.gates));
    }
    out
}
