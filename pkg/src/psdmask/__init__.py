"""Block-masked entrywise operations on positive semidefinite matrices.

The package classifies forbidden-block pattern sequences, evaluates the
matching scalar function families, applies the masked entrywise operators,
and verifies or refutes positivity preservation at desk scale with explicit
witness matrices.
"""

from .errors import PsdMaskError
from .functions import (
    Custom,
    Domain,
    FamilyDescriptor,
    HerzMonomial,
    HerzSeries,
    Identity,
    PreserverFunction,
    ScalarMultiple,
    Zero,
    admissible_c_interval_pair,
    admissible_family,
    conjugate_equivariance_check,
    dominance_check,
    evaluate,
    function_from_json,
    scaled_identity,
)
from .linalg import (
    PsdReport,
    eig_extremes,
    exact_hermitian,
    is_psd,
    kron,
    matrix_from_json,
    matrix_to_json,
    permute_conjugate,
    schur_complement,
    schur_product,
    symmetrize,
)
from .operators import (
    OperatorSpec,
    apply,
    apply_star,
    decompose,
    mask_factorization,
    star_pattern,
)
from .patterns import (
    BlockPattern,
    PatternClass,
    PatternRule,
    RuleFlags,
    all_singletons_rule,
    classify_pattern,
    classify_sequence,
    contiguous_partition_rule,
    empty_rule,
    explicit_rule,
    mask_matrix,
    normalize,
    overlapping_chain_rule,
    pattern_from_json,
    pattern_to_json,
    proper_subpartition_rule,
    rule_from_json,
    rule_to_json,
    single_block_rule,
    validate_rule,
)
from .suite import format_suite_lines, run_theorem_suite
from .verify import (
    CounterExample,
    Verdict,
    VerifyConfig,
    canonical_json,
    correlation_bound_check,
    induction_step_check,
    reduce_scalar,
    refute_scalar_outside_interval,
    sample_correlation,
    sample_psd,
    verify_preservation,
)
from .witnesses import (
    Witness,
    all_ones_witness,
    corner_extend,
    corner_extend_auto,
    duplicated_pair_gram,
    embed_at,
    overlap_probe,
    pad_embed,
    rank_one_gram,
    tail_gram,
    tail_image,
    tensor_blowup,
)

__version__ = "0.1.0"
