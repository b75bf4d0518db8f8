"""Bernoulli group-testing simulation, decoding, and local-search toolkit."""

from .model import (
    DesignParams,
    Estimate,
    Instance,
    Rate,
    ReducedInstance,
    SearchState,
    energy,
    generate,
    instance_from_json,
    instance_to_json,
    load_instance,
    log2_binomial,
    make_params,
    make_search_state,
    n_for_rate,
    nu_for_half,
    reduce_instance,
    save_instance,
    score,
    spawn_seed,
    stable_hash64,
)
from .decoders import comp, dd, md, scomp
from .search import (
    CoverCounter,
    GlauberConfig,
    SearchOutcome,
    acceptance_probability,
    glauber_kss,
    greedy_local_search,
    sss,
)
from .landscape import (
    FirstMomentInputs,
    OgpReport,
    RateBoundResult,
    baseline_rate,
    binom_tail_exponent,
    f_tilde,
    first_moment_f,
    first_moment_rhs,
    kl_bernoulli,
    ogp_report,
    phi_bruteforce,
    phi_table,
    q_function,
    q_log_argument,
    rate_bound,
)
from .harness import (
    CSV_HEADER,
    DECODER_NAMES,
    ExperimentSpec,
    SuccessRecord,
    cuberoot_floor,
    records_to_csv,
    run_point,
    run_sweep,
    write_csv,
)

__version__ = "0.1.0"
