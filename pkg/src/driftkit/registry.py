"""Method names used by the CLI and snapshots, mapped to detector classes."""

from driftkit import concept_drift as cd
from driftkit import data_drift as dd

CONCEPT_DRIFT_METHODS = {
    "adwin": cd.ADWIN,
    "bocd": cd.BOCD,
    "cusum": cd.CUSUM,
    "ddm": cd.DDM,
    "ecdd": cd.ECDD,
    "eddm": cd.EDDM,
    "gma": cd.GMA,
    "hddm_a": cd.HDDM_A,
    "hddm_w": cd.HDDM_W,
    "kswin": cd.KSWIN,
    "page_hinkley": cd.PageHinkley,
    "rddm": cd.RDDM,
    "stepd": cd.STEPD,
}

BATCH_DATA_DRIFT_METHODS = {
    "anderson_darling": dd.AndersonDarlingTest,
    "bhattacharyya": dd.BhattacharyyaDistance,
    "chi2": dd.ChiSquareTest,
    "cvm": dd.CVMTest,
    "emd": dd.EMD,
    "hellinger": dd.HellingerDistance,
    "histogram_intersection": dd.HistogramIntersection,
    "js": dd.JSDivergence,
    "kl": dd.KLDivergence,
    "ks": dd.KSTest,
    "mann_whitney_u": dd.MannWhitneyUTest,
    "mmd": dd.MMD,
    "psi": dd.PSI,
    "welch_t": dd.WelchTTest,
}

STREAMING_DATA_DRIFT_METHODS = {
    "incremental_ks": dd.IncrementalKS,
}

METHODS = {**CONCEPT_DRIFT_METHODS, **BATCH_DATA_DRIFT_METHODS, **STREAMING_DATA_DRIFT_METHODS}
STREAMING_METHODS = {**CONCEPT_DRIFT_METHODS, **STREAMING_DATA_DRIFT_METHODS}


def get_method(name):
    try:
        return METHODS[name]
    except KeyError:
        raise ValueError(f"unknown method {name!r}; choose from {sorted(METHODS)}") from None


def method_name(detector):
    """Registry name of a detector instance."""
    for name, cls in METHODS.items():
        if type(detector) is cls:
            return name
    raise ValueError(f"{type(detector).__name__} is not a registered method")


def create(name, **params):
    return get_method(name)(**params)
