"""Numerical laboratory for difference weak measurement phase estimation."""

from .decoherence import (
    AffineChannel,
    BlochVector,
    apply_channel,
    bloch_to_density,
    cramer_rao,
    phase_flip,
    qfi,
    qfi_dwm,
    qfi_si,
    state_to_bloch,
)
from .noise import (
    EasyToSaturate,
    HardToSaturate,
    NoiseParams,
    Scheme,
    SwmDetectorSpec,
    accuracy_limit,
    noise_terms,
    precision_limit,
    sample_noisy_reading,
    snr,
)
from .optical_train import (
    DetectorReadings,
    TrainConfig,
    amplified_phase,
    detection_probabilities,
    difference_signal,
    difference_signal_first_order,
    dynamic_range,
    max_measurable_phase,
    nonlinearity,
    propagate_exact,
    propagate_si,
)
from .qubit import (
    PauliObservable,
    TwoLevelState,
    WeakValueSetting,
    X,
    Y,
    Z,
    exact_postselected_pointer,
    one,
    plus,
    post_selection_for_weak_value,
    post_selection_state,
    weak_approx_pointer,
    weak_value,
    zero,
)
from .servo import (
    ServoConfig,
    ServoTrace,
    closed_loop_dynamic_range,
    closed_loop_precision,
    quantization_step,
    run_servo,
)

__version__ = "0.1.0"
