"""POI-centric sidewalk accessibility audit toolkit (C++ core bindings)."""

from walkaudit._core import (  # noqa: F401
    LabelTaxonomy,
    PoiTaxonomy,
    RoadNetwork,
    __version__,
    build_prompt,
    dedup_coordinates,
    descriptive_stats,
    feature_contribution,
    haversine_distance,
    normalize_scores,
    poi_across_sector_score,
    poi_sec_score,
    polyline_length,
    raw_segment_score,
    severity_weight,
    spearman,
    weighted_kappa,
)
