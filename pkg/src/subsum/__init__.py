"""Desk-scale toolkit for matrix summability over exact rationals.

Five layers, bottom up: a small language of structured subsets of N with
exact counting and densities (``setlang``); certified three-valued
membership verdicts for ideals on N (``ideals``); summability matrices,
transforms, and regularity (``summability``); strictly increasing index
selectors with an image metric (``sigma``); constructive witnesses —
escapes, oscillation certificates, adversaries (``constructions``); and
set games with auditable transcripts (``games``).  ``cli`` exposes all of
it as the ``subsum`` command.
"""

from ._version import __version__
from .setlang import (
    AP,
    Complement,
    DensityReport,
    DyadicBlocks,
    EnumerationCapError,
    Finite,
    Intersection,
    Nu2Ge,
    Powers2,
    SetDescription,
    SetSyntaxError,
    Shift,
    Squares,
    Tri,
    Union,
    banach_exact,
    count_prefix,
    density_csv,
    density_report,
    exact_density,
    first_member,
    fraction_decimal,
    is_cofinite,
    is_finite,
    iter_members,
    max_window_density,
    member,
    next_member,
    nu2,
    parse_set,
    render,
)
from .ideals import (
    IdealPresentation,
    IntervalPartition,
    MembershipVerdict,
    RestrictedIdeal,
    RestrictedPartition,
    RestrictionError,
    SelectorNotCertifiedError,
    UnsupportedIdealError,
    nonideal_from_partition,
    nu2_column_audit,
    parse_ideal,
)
from .summability import (
    CesaroMatrix,
    ConditionReport,
    DefectReport,
    DomainCheck,
    DomainRiskError,
    ExplicitMatrix,
    GeneratorMatrix,
    IdentityMatrix,
    MatrixSpecError,
    RegularityVerdict,
    RowDropMatrix,
    RowProfile,
    RowSeq,
    SequenceSpec,
    SequenceSpecError,
    SummabilityMatrix,
    TailToleranceError,
    TransformPoint,
    domain_check,
    exception_profile,
    indicator_sequence,
    matrix_ideal_limit_defect,
    matrix_ideal_verdict,
    parse_matrix,
    parse_rle,
    parse_row,
    parse_sequence,
    random_rowfinite_matrix,
    regularity_verdict,
    render_rle,
    row_profile,
    sequence_from_rle,
    sequence_from_values,
    transform_prefix,
    transform_value,
    validate_matrix_ideal,
)
from .sigma import (
    IDENTITY_SELECTOR,
    Consecutive,
    FunctionalValue,
    ImageUndecidableError,
    MetricInterval,
    RuleTail,
    Selector,
    SelectorSpecError,
    ball_contains,
    metric,
    modulus_of_continuity,
    parse_selector,
    sample_selector,
    selector_transform,
    shared_stem_bound,
)
from .constructions import (
    AdversaryReport,
    BoundaryMean,
    ConstructionError,
    EscapeResult,
    IdealLimitVerdict,
    MeagernessDemo,
    OscillationCertificate,
    OscillationPair,
    PreconditionError,
    certificate_from_values,
    escape_rowfinite,
    escape_unbounded,
    ideal_limit,
    ideal_limit_certificate,
    meagerness_demo,
    oscillation_pair,
    quantile_candidates,
    steinhaus_adversary,
)
from .games import (
    Adjudication,
    DiagonalizationFamily,
    GameRound,
    GameTranscript,
    GreedyMinStrategy,
    IllegalMoveError,
    INTERVAL_FAMILY,
    PrefixDensityStrategy,
    PrefixTakeStrategy,
    ReplyStrategy,
    SeededRandomStrategy,
    SINGLETON_FAMILY,
    StrategySearchError,
    UniversalRowReport,
    adjudicate,
    check_universal_row,
    nu2_tower_move,
    parse_strategy,
    play_game,
    play_round,
    replay_matches,
)

__all__ = [
    "__version__",
    # setlang
    "AP",
    "Complement",
    "DensityReport",
    "DyadicBlocks",
    "EnumerationCapError",
    "Finite",
    "Intersection",
    "Nu2Ge",
    "Powers2",
    "SetDescription",
    "SetSyntaxError",
    "Shift",
    "Squares",
    "Tri",
    "Union",
    "banach_exact",
    "count_prefix",
    "density_csv",
    "density_report",
    "exact_density",
    "first_member",
    "fraction_decimal",
    "is_cofinite",
    "is_finite",
    "iter_members",
    "max_window_density",
    "member",
    "next_member",
    "nu2",
    "parse_set",
    "render",
    # ideals
    "IdealPresentation",
    "IntervalPartition",
    "MembershipVerdict",
    "RestrictedIdeal",
    "RestrictedPartition",
    "RestrictionError",
    "SelectorNotCertifiedError",
    "UnsupportedIdealError",
    "nonideal_from_partition",
    "nu2_column_audit",
    "parse_ideal",
    # summability
    "CesaroMatrix",
    "ConditionReport",
    "DefectReport",
    "DomainCheck",
    "DomainRiskError",
    "ExplicitMatrix",
    "GeneratorMatrix",
    "IdentityMatrix",
    "MatrixSpecError",
    "RegularityVerdict",
    "RowDropMatrix",
    "RowProfile",
    "RowSeq",
    "SequenceSpec",
    "SequenceSpecError",
    "SummabilityMatrix",
    "TailToleranceError",
    "TransformPoint",
    "domain_check",
    "exception_profile",
    "indicator_sequence",
    "matrix_ideal_limit_defect",
    "matrix_ideal_verdict",
    "parse_matrix",
    "parse_rle",
    "parse_row",
    "parse_sequence",
    "random_rowfinite_matrix",
    "regularity_verdict",
    "render_rle",
    "row_profile",
    "sequence_from_rle",
    "sequence_from_values",
    "transform_prefix",
    "transform_value",
    "validate_matrix_ideal",
    # sigma
    "IDENTITY_SELECTOR",
    "Consecutive",
    "FunctionalValue",
    "ImageUndecidableError",
    "MetricInterval",
    "RuleTail",
    "Selector",
    "SelectorSpecError",
    "ball_contains",
    "metric",
    "modulus_of_continuity",
    "parse_selector",
    "sample_selector",
    "selector_transform",
    "shared_stem_bound",
    # constructions
    "AdversaryReport",
    "BoundaryMean",
    "ConstructionError",
    "EscapeResult",
    "IdealLimitVerdict",
    "MeagernessDemo",
    "OscillationCertificate",
    "OscillationPair",
    "PreconditionError",
    "certificate_from_values",
    "escape_rowfinite",
    "escape_unbounded",
    "ideal_limit",
    "ideal_limit_certificate",
    "meagerness_demo",
    "oscillation_pair",
    "quantile_candidates",
    "steinhaus_adversary",
    # games
    "Adjudication",
    "DiagonalizationFamily",
    "GameRound",
    "GameTranscript",
    "GreedyMinStrategy",
    "IllegalMoveError",
    "INTERVAL_FAMILY",
    "PrefixDensityStrategy",
    "PrefixTakeStrategy",
    "ReplyStrategy",
    "SeededRandomStrategy",
    "SINGLETON_FAMILY",
    "StrategySearchError",
    "UniversalRowReport",
    "adjudicate",
    "check_universal_row",
    "nu2_tower_move",
    "parse_strategy",
    "play_game",
    "play_round",
    "replay_matches",
]
