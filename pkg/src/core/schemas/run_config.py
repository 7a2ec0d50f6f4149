from enum import Enum
from typing import Optional, Tuple, Union

from pydantic import Field, field_validator, model_validator

from src.core.config.loader import get_config
from src.core.rac.trial import MAX_ROUNDS, ScoringMode
from src.core.schemas.base import BaseSchema


class InputVariant(str, Enum):
    IID_BIAS = "IID_BIAS"
    MARKOV = "MARKOV"
    DRIFT_SINE = "DRIFT_SINE"
    DRIFT_WALK = "DRIFT_WALK"


class StrategyVariant(str, Enum):
    STATIC_A0 = "STATIC_A0"
    STATIC_A1 = "STATIC_A1"
    BIAS_AWARE = "BIAS_AWARE"
    BANDIT = "BANDIT"
    WINDOWED_BANDIT = "WINDOWED_BANDIT"
    PARAM_DEVICE = "PARAM_DEVICE"


class SelectionVariant(str, Enum):
    NONE = "NONE"
    RANDOM = "RANDOM"
    ADVERSARIAL = "ADVERSARIAL"


class BenchmarkKind(str, Enum):
    NOMINAL = "NOMINAL"
    EFFECTIVE = "EFFECTIVE"
    ROBUST = "ROBUST"
    NONSTATIONARY = "NONSTATIONARY"


class EpsMaxSource(str, Enum):
    GIVEN = "GIVEN"
    DATA_DRIVEN = "DATA_DRIVEN"


class InputModelSpec(BaseSchema):
    """Generative law for the round inputs ``(a0, a1, y)``.

    Only the fields of the selected variant are read; bias follows the
    convention ``epsilon = Pr(y=0) - 1/2``. ``epsilon0`` is the baseline of
    DRIFT_SINE and the starting point of DRIFT_WALK.
    """
    variant: InputVariant = Field(InputVariant.IID_BIAS, description="Input law")
    epsilon: float = Field(0.0, description="Query bias (IID_BIAS)")
    p00: float = Field(0.5, description="Pr(y_t=0 | y_{t-1}=0) (MARKOV)")
    p10: float = Field(0.5, description="Pr(y_t=0 | y_{t-1}=1) (MARKOV)")
    epsilon0: float = Field(0.0, description="Baseline bias (DRIFT_SINE) or start value (DRIFT_WALK)")
    amp: float = Field(0.0, ge=0.0, description="Sine amplitude A (DRIFT_SINE)")
    period: float = Field(1.0, gt=0.0, description="Sine period T in rounds (DRIFT_SINE)")
    step: float = Field(0.01, ge=0.0, description="Walk step size (DRIFT_WALK)")
    bound: float = Field(0.5, ge=0.0, description="Walk clip magnitude (DRIFT_WALK)")

    @model_validator(mode='after')
    def check_variant_invariants(self) -> 'InputModelSpec':
        if self.variant is InputVariant.IID_BIAS and abs(self.epsilon) > 0.5:
            raise ValueError(f'epsilon must satisfy |epsilon| <= 1/2, got {self.epsilon}')
        if self.variant is InputVariant.MARKOV:
            for name in ("p00", "p10"):
                value = getattr(self, name)
                if not 0.0 <= value <= 1.0:
                    raise ValueError(f'{name} must lie in [0, 1], got {value}')
            if self.p00 == 1.0 and self.p10 == 0.0:
                raise ValueError('reducible chain: p00=1 and p10=0')
        if self.variant is InputVariant.DRIFT_SINE and abs(self.epsilon0) + self.amp > 0.5:
            raise ValueError(f'|epsilon0| + amp must be <= 1/2, got {abs(self.epsilon0) + self.amp}')
        if self.variant is InputVariant.DRIFT_WALK:
            if self.bound > 0.5:
                raise ValueError(f'bound must be <= 1/2, got {self.bound}')
            if abs(self.epsilon0) > self.bound:
                raise ValueError(f'walk start |epsilon0|={abs(self.epsilon0)} exceeds bound {self.bound}')
        return self

    def tag(self) -> str:
        if self.variant is InputVariant.IID_BIAS:
            return f"iid(eps={self.epsilon:g})"
        if self.variant is InputVariant.MARKOV:
            return f"markov(p00={self.p00:g},p10={self.p10:g})"
        if self.variant is InputVariant.DRIFT_SINE:
            return f"sine(eps0={self.epsilon0:g},A={self.amp:g},T={self.period:g})"
        return f"walk(eps0={self.epsilon0:g},step={self.step:g},bound={self.bound:g})"


class StrategySpec(BaseSchema):
    """Classical encoder policy (decoder fixed to b = m) or the parametric reference device."""
    variant: StrategyVariant = Field(StrategyVariant.STATIC_A0, description="Encoder policy")
    eta: float = Field(default_factory=lambda: float(get_config('defaults.bandit.eta', 0.05)),
                       gt=0.0, le=1.0, description="Learning rate (bandits)")
    explore: float = Field(default_factory=lambda: float(get_config('defaults.bandit.explore', 0.05)),
                           ge=0.0, le=1.0, description="Exploration probability (bandits)")
    window: int = Field(default_factory=lambda: int(get_config('defaults.bandit.window', 200)),
                        ge=1, description="Query window W (WINDOWED_BANDIT)")
    q_init: Union[float, Tuple[float, float]] = Field(
        default_factory=lambda: float(get_config('defaults.bandit.q_init', 0.5)),
        description="Initial action values, one shared value or one per action")
    p_success: Optional[float] = Field(None, ge=0.0, le=1.0, description="Success probability (PARAM_DEVICE)")
    known_eps: float = Field(0.0, ge=-0.5, le=0.5, description="Bias handed to BIAS_AWARE")

    @field_validator('q_init')
    @classmethod
    def q_init_must_be_finite(cls, v):
        values = v if isinstance(v, tuple) else (v,)
        for value in values:
            if not 0.0 <= value <= 1.0:
                raise ValueError(f'q_init values must lie in [0, 1], got {value}')
        return v

    @model_validator(mode='after')
    def device_needs_probability(self) -> 'StrategySpec':
        if self.variant is StrategyVariant.PARAM_DEVICE and self.p_success is None:
            raise ValueError('PARAM_DEVICE requires p_success')
        return self

    @property
    def is_adaptive(self) -> bool:
        return self.variant in (StrategyVariant.BANDIT, StrategyVariant.WINDOWED_BANDIT)

    def initial_q(self) -> Tuple[float, float]:
        if isinstance(self.q_init, tuple):
            return float(self.q_init[0]), float(self.q_init[1])
        return float(self.q_init), float(self.q_init)

    def tag(self) -> str:
        if self.variant is StrategyVariant.PARAM_DEVICE:
            return f"device(p={self.p_success:g})"
        if self.variant is StrategyVariant.BIAS_AWARE:
            return f"bias_aware(eps={self.known_eps:g})"
        if self.variant is StrategyVariant.BANDIT:
            return f"bandit(eta={self.eta:g},explore={self.explore:g})"
        if self.variant is StrategyVariant.WINDOWED_BANDIT:
            return f"windowed_bandit(eta={self.eta:g},explore={self.explore:g},W={self.window})"
        return self.variant.value.lower()


class SelectionSpec(BaseSchema):
    """Selection rule deciding which rounds are kept for evaluation."""
    variant: SelectionVariant = Field(SelectionVariant.NONE, description="Selection rule")
    discard_fraction: float = Field(0.0, ge=0.0, lt=1.0, description="Fraction f of rounds discarded")

    def tag(self) -> str:
        if self.variant is SelectionVariant.NONE:
            return "keep_all"
        return f"{self.variant.value.lower()}(f={self.discard_fraction:g})"


class BenchmarkMode(BaseSchema):
    """Classical reference value against which the score's lower bound is compared."""
    mode: BenchmarkKind = Field(BenchmarkKind.NOMINAL, description="Benchmark family")
    known_eps: Optional[float] = Field(None, ge=-0.5, le=0.5, description="Bias for EFFECTIVE")
    eps_max_source: EpsMaxSource = Field(EpsMaxSource.DATA_DRIVEN, description="Where ROBUST takes eps_max from")
    eps_max: Optional[float] = Field(None, ge=0.0, le=0.5, description="Given bias bound for ROBUST")
    schedule: Optional[Tuple[float, ...]] = Field(
        None, description="Per-round bias schedule for NONSTATIONARY; the simulator supplies it when absent")

    @model_validator(mode='after')
    def mode_fields_present(self) -> 'BenchmarkMode':
        if self.mode is BenchmarkKind.EFFECTIVE and self.known_eps is None:
            raise ValueError('EFFECTIVE benchmark requires known_eps')
        if (self.mode is BenchmarkKind.ROBUST and self.eps_max_source is EpsMaxSource.GIVEN
                and self.eps_max is None):
            raise ValueError('ROBUST benchmark with eps_max_source GIVEN requires eps_max')
        if self.schedule is not None:
            if len(self.schedule) == 0:
                raise ValueError('schedule must not be empty')
            if any(abs(e) > 0.5 for e in self.schedule):
                raise ValueError('schedule entries must satisfy |eps_t| <= 1/2')
        return self


class ConfidenceParams(BaseSchema):
    """Significance levels of the score bound (alpha) and of the bias interval (beta)."""
    alpha: float = Field(default_factory=lambda: float(get_config('defaults.alpha', 0.05)), gt=0.0, lt=1.0)
    beta: float = Field(default_factory=lambda: float(get_config('defaults.beta', 0.05)), gt=0.0, lt=1.0)
    bound: str = Field(default_factory=lambda: str(get_config('defaults.bound', 'azuma')),
                       description="Name of the concentration bound")


class ReplicateSettings(BaseSchema):
    """Monte Carlo settings read from the optional ``replicates`` section of a run config."""
    m_reps: int = Field(100, ge=1)
    base_seed: int = Field(0, ge=0)
    workers: int = Field(default_factory=lambda: int(get_config('harness.workers', 1)), ge=1)


class RunConfig(BaseSchema):
    """Everything needed to simulate and certify one run."""
    n_rounds: int = Field(default_factory=lambda: int(get_config('defaults.n_rounds', 20000)),
                          ge=1, le=MAX_ROUNDS)
    seed: int = Field(default_factory=lambda: int(get_config('defaults.seed', 12345)), ge=0)
    input_model: InputModelSpec = Field(default_factory=InputModelSpec)
    strategy: StrategySpec = Field(default_factory=StrategySpec)
    selection: SelectionSpec = Field(default_factory=SelectionSpec)
    scoring: ScoringMode = Field(ScoringMode.UNCONDITIONAL)
    benchmark: BenchmarkMode = Field(default_factory=BenchmarkMode)
    confidence: ConfidenceParams = Field(default_factory=ConfidenceParams)

    @property
    def model_tag(self) -> str:
        return "|".join([self.input_model.tag(), self.strategy.tag(), self.selection.tag()])
