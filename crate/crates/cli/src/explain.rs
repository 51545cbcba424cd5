use crate::config::Command;

/// The mathematical claim a subcommand checks.
pub fn claim(cmd: Command) -> &'static str {
    match cmd {
        Command::Invariants => {
            "The W-invariant polynomials form the polynomial algebra ℝ[p₁, …, pₙ] on \
             homogeneous generators whose degrees 2 = k₁ ≤ … ≤ kₙ = h depend only on W."
        }
        Command::VerifyJacobian => {
            "det ∂(p₁, …, pₙ)/∂(x₁, …, xₙ) = c·∏_τ λ_τ(x) with a constant c ≠ 0, the product \
             running over the positive roots τ."
        }
        Command::VerifyStatement => {
            "If some k×k minor ∂(p₁, …, p_k)/∂(x_{i₁}, …, x_{i_k}) is nonzero at x and every \
             bordering minor ∂(p₁, …, p_{k+1})/∂(x_{i₁}, …, x_{i_k}, x_j) vanishes at x, then \
             the Jacobian of P has rank k at x."
        }
        Command::Morse => {
            "On a nonempty fiber P_k⁻¹(mᵏ) ∩ C̄ with 1 ≤ k < n, the restriction of p_{k+1} is \
             a Morse function whose critical points lie on k-dimensional faces of C̄."
        }
        Command::Fiber => {
            "Each fiber P_k⁻¹(mᵏ) ∩ C̄ is connected or empty, and p_{k+1} maps a nonempty one \
             onto a point or a closed interval."
        }
        Command::Whitney => {
            "For every a > 0 there is C with any u, v in P(C̄ ∩ B̄_a) joined inside P(C̄ ∩ B̄_a) \
             by a path of length at most C·|u − v|."
        }
        Command::Report => {
            "A saved report r is reproduced exactly on re-rendering: parse(emit(r)) = r."
        }
        Command::All => "The image P(ℝⁿ) of the Chevalley map is Whitney 1-regular.",
    }
}

pub fn explain(cmd: Command) -> String {
    format!("{}: {}\n", cmd.name(), claim(cmd))
}
