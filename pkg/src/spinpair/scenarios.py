"""End-to-end contrast runs on the two-spin pair.

Each runner builds a preparation, optionally measures the remote spin,
evolves the system spin, and returns a ScenarioReport with:

* named arms ("armA", "armB"): the contrasted trajectories on one shared grid;
* divergence: the largest gap in the second Bloch component between arms,
  which is where every contrast in this package shows up;
* checks: the runner's contract assertions, which the command line turns
  into exit codes;
* narrative: probabilities, branch listings, per-outcome trajectories and
  non-contractual metrics.

All clocks start at the measurement where one occurs: a scenario's time
zero is the moment the post-measurement state is in hand.

Passing rate_fn=fixed_rate(omega) to any nonlinear runner replaces the
state-dependent precession with a state-independent one; every divergence
then collapses to zero, which pins the contrasts on the nonlinearity and
nothing else. Contract checks are suspended under such an override since
they encode the state-dependent solutions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .dynamics_linear import no_signalling_suite
from .dynamics_nonlinear import (
    EvolutionPolicy,
    RateFn,
    Trajectory,
    evolve_ensemble,
    time_grid,
)
from .measurement import MeasurementBasis, OutcomeBranch, basis_from_vectors, measure_all
from .qmath import trace_out_remote
from .states import (
    DOWN,
    UP,
    Branch,
    Ensemble,
    correlated_ensemble,
    density_of,
    diag_eigenstates,
    product_ensemble,
    singlet,
)


class ScenarioId(enum.Enum):
    """The five runnable contrasts."""

    LINEAR_BASELINE = "linear-baseline"
    NO_CORRELATIONS = "no-correlations"
    CLASSICAL_CORRELATIONS = "classical-correlations"
    CHANGED_CORRELATIONS = "changed-correlations"
    ENTANGLEMENT = "entanglement"


class BasisChoice(enum.Enum):
    """Remote measurement basis for the entanglement scenario."""

    UPDOWN = "updown"
    DIAG = "diag"


class DegenerateConfigError(ValueError):
    """The configuration collapses the scenario's contrast (e.g. p in {0, 1})."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Knobs shared by the runners; defaults resolve every contrast cleanly."""

    p: float = 0.75
    epsilon: float = 1.0
    t_max: float = 10.0
    dt: float = 1e-3
    basis_choice: BasisChoice = BasisChoice.UPDOWN
    seed: int = 42
    trials: int = 1000

    def __post_init__(self) -> None:
        if not 0.0 <= float(self.p) <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p!r}")
        if float(self.dt) <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if float(self.t_max) <= 0.0:
            raise ValueError(f"t_max must be positive, got {self.t_max!r}")
        if int(self.trials) < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials!r}")


@dataclass(frozen=True)
class ContractCheck:
    """One named contract: a value compared against a bound."""

    name: str
    value: float
    bound: float
    comparison: str = "<="

    @property
    def passed(self) -> bool:
        if self.comparison == "<=":
            return self.value <= self.bound
        if self.comparison == ">":
            return self.value > self.bound
        raise ValueError(f"unknown comparison {self.comparison!r}")


@dataclass(frozen=True, eq=False)
class ScenarioReport:
    """Everything one runner produces; a pure function of its config."""

    scenario: ScenarioId
    config: ScenarioConfig
    arms: Mapping[str, Trajectory]
    divergence: float
    narrative: dict
    checks: tuple[ContractCheck, ...]

    @property
    def contracts_ok(self) -> bool:
        return all(check.passed for check in self.checks)


# ---------------------------------------------------------------------------
# preparations and bases


def uncorrelated_preparation(p: float) -> Ensemble:
    """Mixture of the two diagonal-axis system states, product with a fixed
    remote state: no correlations between the spins."""
    plus, minus = diag_eigenstates()
    return product_ensemble([(p, plus), (1.0 - p, minus)], [(1.0, UP)])


def classical_preparation(p: float) -> Ensemble:
    """Diagonal-axis system mixture whose branches are flagged by orthogonal
    remote markers: classical correlations, no entanglement."""
    plus, minus = diag_eigenstates()
    return correlated_ensemble(p, plus, UP, minus, DOWN)


def updown_preparation() -> Ensemble:
    """Half-half mixture of the third-axis eigenstates, flagged by remote markers."""
    return correlated_ensemble(0.5, UP, UP, DOWN, DOWN)


def diag_preparation() -> Ensemble:
    """Half-half mixture of the diagonal-axis eigenstates, flagged by remote markers."""
    return classical_preparation(0.5)


def singlet_preparation() -> Ensemble:
    """The total-spin-zero pure state as a one-branch ensemble."""
    return Ensemble((Branch(1.0, singlet()),))


def marker_basis() -> MeasurementBasis:
    """Remote measurement along the marker (up/down) directions."""
    return basis_from_vectors(UP, DOWN)


def diag_basis() -> MeasurementBasis:
    """Remote measurement along the diagonal-axis directions."""
    return basis_from_vectors(*diag_eigenstates())


# ---------------------------------------------------------------------------
# expected closed-form solutions, written out once for contract evaluation


def _mixture_s2(p: float, epsilon: float, times: np.ndarray) -> np.ndarray:
    """Second component for the diagonal mixture: amplitude and frequency both
    scale with 2p - 1."""
    amplitude = (2.0 * p - 1.0) / np.sqrt(2.0)
    return amplitude * np.sin(np.sqrt(2.0) * (2.0 * p - 1.0) * epsilon * times)


def _pure_s2(epsilon: float, times: np.ndarray) -> np.ndarray:
    """Second component for either pure diagonal state; the sign of the state
    cancels against the sign of its precession frequency."""
    return np.sin(np.sqrt(2.0) * epsilon * times) / np.sqrt(2.0)


# ---------------------------------------------------------------------------
# report plumbing


def _max_abs(values) -> float:
    return float(np.max(np.abs(values)))


def _s2_divergence(a: Trajectory, b: Trajectory) -> float:
    return _max_abs(a.sigma2 - b.sigma2)


def _bloch_distance(a: Trajectory, b: Trajectory) -> float:
    return float(np.max(np.linalg.norm(a.points - b.points, axis=1)))


def _describe_branch(branch: Branch) -> dict:
    return {
        "weight": branch.weight,
        "vector": [[float(z.real), float(z.imag)] for z in branch.vector],
    }


def _describe_ensemble(ensemble: Ensemble) -> list[dict]:
    return [_describe_branch(branch) for branch in ensemble.branches]


def _averaged_arm(
    outcomes: tuple[OutcomeBranch, ...],
    policy: EvolutionPolicy,
    epsilon: float,
    times: np.ndarray,
    rate_fn: RateFn | None,
) -> tuple[Trajectory, dict[str, Trajectory], list[dict]]:
    """Probability-weighted average over measurement outcomes, plus the
    per-outcome trajectories and outcome summaries for the narrative."""
    points = np.zeros((times.size, 3))
    per_outcome: dict[str, Trajectory] = {}
    summaries: list[dict] = []
    for outcome in outcomes:
        traj = evolve_ensemble(outcome.post_state, policy, epsilon, times, rate_fn=rate_fn)
        points += outcome.probability * traj.points
        per_outcome[f"outcome{outcome.outcome_index}"] = traj
        summaries.append(
            {
                "outcome": outcome.outcome_index,
                "probability": outcome.probability,
                "post_branches": _describe_ensemble(outcome.post_state),
            }
        )
    return Trajectory(times, points), per_outcome, summaries


# ---------------------------------------------------------------------------
# runners


def run_linear_baseline(cfg: ScenarioConfig) -> ScenarioReport:
    """Seeded randomized verification that linear dynamics admits no remote influence."""
    suite = no_signalling_suite(cfg.trials, cfg.seed)
    checks = (
        ContractCheck("max linear-theory deviation", suite.max_deviation, 1e-10),
    )
    narrative = {
        "description": "randomized linear-theory suite: remote operations move no system probability",
        "trials": suite.trials,
        "seed": suite.seed,
        "outcome_sum_deviation": suite.outcome_sum_deviation,
        "remote_choice_deviation": suite.remote_choice_deviation,
        "interposed_deviation": suite.interposed_deviation,
    }
    return ScenarioReport(
        ScenarioId.LINEAR_BASELINE, cfg, {}, suite.max_deviation, narrative, checks
    )


def run_no_correlations(cfg: ScenarioConfig, rate_fn: RateFn | None = None) -> ScenarioReport:
    """Uncorrelated preparation: measuring the remote spin changes nothing.

    armA evolves the aggregate Bloch vector with no measurement; armB measures
    the remote markers first, evolves each outcome the same way, and averages.
    """
    times = time_grid(cfg.t_max, cfg.dt)
    prepared = uncorrelated_preparation(cfg.p)
    arm_a = evolve_ensemble(
        prepared, EvolutionPolicy.AGGREGATE_MEANS, cfg.epsilon, times, rate_fn=rate_fn
    )
    outcomes = measure_all(prepared, marker_basis())
    arm_b, per_outcome, summaries = _averaged_arm(
        outcomes, EvolutionPolicy.AGGREGATE_MEANS, cfg.epsilon, times, rate_fn
    )
    divergence = _s2_divergence(arm_a, arm_b)
    if rate_fn is None:
        expected = _mixture_s2(cfg.p, cfg.epsilon, times)
        checks = (
            ContractCheck(
                "armA matches the mixture solution", _max_abs(arm_a.sigma2 - expected), 1e-8
            ),
            ContractCheck(
                "armB matches the mixture solution", _max_abs(arm_b.sigma2 - expected), 1e-8
            ),
            ContractCheck("remote measurement changes nothing", divergence, 1e-10),
        )
    else:
        checks = ()
    narrative = {
        "description": "no correlations: the remote measurement cannot move the system trajectory",
        "arms": {
            "armA": "aggregate evolution, no measurement",
            "armB": "remote markers measured, outcomes evolved and averaged",
        },
        "p": cfg.p,
        "epsilon": cfg.epsilon,
        "preparation_branches": _describe_ensemble(prepared),
        "outcomes": summaries,
        "per_outcome_trajectories": per_outcome,
        "bloch_divergence": _bloch_distance(arm_a, arm_b),
        "rate_override": rate_fn is not None,
    }
    return ScenarioReport(
        ScenarioId.NO_CORRELATIONS,
        cfg,
        {"armA": arm_a, "armB": arm_b},
        divergence,
        narrative,
        checks,
    )


def run_classical_correlations(
    cfg: ScenarioConfig, rate_fn: RateFn | None = None
) -> ScenarioReport:
    """Classically correlated preparation: the remote measurement resets the
    initial conditions to a pure state, whatever the mixing weight was.

    armA measures the markers on the correlated preparation and evolves each
    collapsed outcome branch-wise; armB is the unmeasured uncorrelated arm at
    the same mixing weight. The two differ for every genuine mixture even
    though both preparations have the same reduced system density matrix.
    """
    if cfg.p in (0.0, 1.0):
        raise DegenerateConfigError(
            "p in {0, 1} leaves a single branch; the contrast needs a genuine mixture"
        )
    times = time_grid(cfg.t_max, cfg.dt)
    prepared = classical_preparation(cfg.p)
    outcomes = measure_all(prepared, marker_basis())
    arm_a, per_outcome, summaries = _averaged_arm(
        outcomes, EvolutionPolicy.BRANCH_MEANS, cfg.epsilon, times, rate_fn
    )
    baseline = uncorrelated_preparation(cfg.p)
    arm_b = evolve_ensemble(
        baseline, EvolutionPolicy.AGGREGATE_MEANS, cfg.epsilon, times, rate_fn=rate_fn
    )
    divergence = _s2_divergence(arm_a, arm_b)
    if rate_fn is None:
        expected_pure = _pure_s2(cfg.epsilon, times)
        analytic_gap = _max_abs(expected_pure - _mixture_s2(cfg.p, cfg.epsilon, times))
        checks = (
            ContractCheck(
                "armA matches the pure-state solution",
                _max_abs(arm_a.sigma2 - expected_pure),
                1e-8,
            ),
            ContractCheck(
                "divergence matches the analytic gap", abs(divergence - analytic_gap), 1e-8
            ),
            ContractCheck("divergence is strictly positive", divergence, 0.0, ">"),
        )
    else:
        checks = ()
    narrative = {
        "description": "classical correlations: measured arm follows the pure-state solution, independent of p",
        "arms": {
            "armA": "correlated preparation, remote markers measured, branch-wise evolution",
            "armB": "uncorrelated preparation at the same p, aggregate evolution, no measurement",
        },
        "p": cfg.p,
        "epsilon": cfg.epsilon,
        "preparation_branches": _describe_ensemble(prepared),
        "outcomes": summaries,
        "per_outcome_trajectories": per_outcome,
        "bloch_divergence": _bloch_distance(arm_a, arm_b),
        "rate_override": rate_fn is not None,
    }
    return ScenarioReport(
        ScenarioId.CLASSICAL_CORRELATIONS,
        cfg,
        {"armA": arm_a, "armB": arm_b},
        divergence,
        narrative,
        checks,
    )


def run_changed_correlations(
    cfg: ScenarioConfig, rate_fn: RateFn | None = None
) -> ScenarioReport:
    """Two half-half preparations with identical reduced system states but
    different branch decompositions give different measured dynamics.

    armA starts from the third-axis mixture (post-measurement branches sit at
    the poles, so nothing precesses); armB starts from the diagonal-axis
    mixture (post-measurement branches precess at full amplitude). Both
    preparations use p = 1/2 by construction.
    """
    times = time_grid(cfg.t_max, cfg.dt)
    prep_a = updown_preparation()
    prep_b = diag_preparation()
    outcomes_a = measure_all(prep_a, marker_basis())
    outcomes_b = measure_all(prep_b, marker_basis())
    arm_a, per_outcome_a, summaries_a = _averaged_arm(
        outcomes_a, EvolutionPolicy.BRANCH_MEANS, cfg.epsilon, times, rate_fn
    )
    arm_b, per_outcome_b, summaries_b = _averaged_arm(
        outcomes_b, EvolutionPolicy.BRANCH_MEANS, cfg.epsilon, times, rate_fn
    )
    divergence = _s2_divergence(arm_a, arm_b)
    reduced_gap = _max_abs(
        trace_out_remote(density_of(prep_a)) - trace_out_remote(density_of(prep_b))
    )
    composite_gap = _max_abs(density_of(prep_a) - density_of(prep_b))
    if rate_fn is None:
        expected_pure = _pure_s2(cfg.epsilon, times)
        checks = (
            ContractCheck("armA second component is zero", _max_abs(arm_a.sigma2), 1e-10),
            ContractCheck(
                "armB matches the pure-state solution",
                _max_abs(arm_b.sigma2 - expected_pure),
                1e-8,
            ),
            ContractCheck("reduced system densities agree", reduced_gap, 1e-12),
            ContractCheck("composite densities differ", composite_gap, 0.1, ">"),
        )
    else:
        checks = ()
    narrative = {
        "description": "changed correlations: same reduced density matrix, different decompositions, different dynamics",
        "arms": {
            "armA": "third-axis mixture, markers measured, branch-wise evolution",
            "armB": "diagonal-axis mixture, markers measured, branch-wise evolution",
        },
        "epsilon": cfg.epsilon,
        "preparation_branches": {
            "armA": _describe_ensemble(prep_a),
            "armB": _describe_ensemble(prep_b),
        },
        "outcomes": {"armA": summaries_a, "armB": summaries_b},
        "per_outcome_trajectories": {
            **{f"armA/{k}": v for k, v in per_outcome_a.items()},
            **{f"armB/{k}": v for k, v in per_outcome_b.items()},
        },
        "reduced_density_gap": reduced_gap,
        "composite_density_gap": composite_gap,
        "bloch_divergence": _bloch_distance(arm_a, arm_b),
        "rate_override": rate_fn is not None,
    }
    return ScenarioReport(
        ScenarioId.CHANGED_CORRELATIONS,
        cfg,
        {"armA": arm_a, "armB": arm_b},
        divergence,
        narrative,
        checks,
    )


def run_entanglement(cfg: ScenarioConfig, rate_fn: RateFn | None = None) -> ScenarioReport:
    """Singlet preparation: the choice of remote basis alone selects the dynamics.

    armA measures the remote spin along the marker directions (collapsed
    system states sit at the poles, nothing precesses); armB measures along
    the diagonal directions (collapsed states precess at full amplitude).
    The divergence between the two arms is the signal magnitude a remote
    basis choice would imprint on the system. Both arms are always computed;
    cfg.basis_choice marks which one the narrative features.
    """
    times = time_grid(cfg.t_max, cfg.dt)
    prepared = singlet_preparation()
    outcomes_a = measure_all(prepared, marker_basis())
    outcomes_b = measure_all(prepared, diag_basis())
    arm_a, per_outcome_a, summaries_a = _averaged_arm(
        outcomes_a, EvolutionPolicy.BRANCH_MEANS, cfg.epsilon, times, rate_fn
    )
    arm_b, per_outcome_b, summaries_b = _averaged_arm(
        outcomes_b, EvolutionPolicy.BRANCH_MEANS, cfg.epsilon, times, rate_fn
    )
    divergence = _s2_divergence(arm_a, arm_b)
    if rate_fn is None:
        expected_pure = _pure_s2(cfg.epsilon, times)
        checks = (
            ContractCheck("updown arm second component is zero", _max_abs(arm_a.sigma2), 1e-10),
            ContractCheck(
                "diag arm matches the pure-state solution",
                _max_abs(arm_b.sigma2 - expected_pure),
                1e-8,
            ),
            ContractCheck(
                "signal magnitude matches the solution envelope",
                abs(divergence - _max_abs(expected_pure)),
                1e-8,
            ),
        )
    else:
        checks = ()
    narrative = {
        "description": "entanglement: the remote basis choice alone selects which dynamics the system shows",
        "arms": {
            "armA": "remote measured along marker (updown) directions",
            "armB": "remote measured along diagonal directions",
        },
        "epsilon": cfg.epsilon,
        "basis_choice": cfg.basis_choice.value,
        "featured_arm": "armA" if cfg.basis_choice is BasisChoice.UPDOWN else "armB",
        "outcomes": {"armA": summaries_a, "armB": summaries_b},
        "per_outcome_trajectories": {
            **{f"armA/{k}": v for k, v in per_outcome_a.items()},
            **{f"armB/{k}": v for k, v in per_outcome_b.items()},
        },
        "bloch_divergence": _bloch_distance(arm_a, arm_b),
        "rate_override": rate_fn is not None,
    }
    return ScenarioReport(
        ScenarioId.ENTANGLEMENT,
        cfg,
        {"armA": arm_a, "armB": arm_b},
        divergence,
        narrative,
        checks,
    )


def run_scenario(
    scenario: ScenarioId, cfg: ScenarioConfig, rate_fn: RateFn | None = None
) -> ScenarioReport:
    """Dispatch to the runner for the given scenario."""
    if scenario is ScenarioId.LINEAR_BASELINE:
        return run_linear_baseline(cfg)
    runners = {
        ScenarioId.NO_CORRELATIONS: run_no_correlations,
        ScenarioId.CLASSICAL_CORRELATIONS: run_classical_correlations,
        ScenarioId.CHANGED_CORRELATIONS: run_changed_correlations,
        ScenarioId.ENTANGLEMENT: run_entanglement,
    }
    return runners[scenario](cfg, rate_fn=rate_fn)
