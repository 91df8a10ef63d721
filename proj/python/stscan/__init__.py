"""Space-time clustering of dated, georeferenced event catalogs."""

from ._core import (
    Catalog,
    ConfigError,
    DataError,
    NumericalError,
    __version__,
    empirical_variogram,
    fit_variogram,
    haversine_km,
    k_function,
    krige,
    load_catalog,
    scan,
    simulate,
)

__all__ = [
    "Catalog",
    "ConfigError",
    "DataError",
    "NumericalError",
    "__version__",
    "empirical_variogram",
    "fit_variogram",
    "haversine_km",
    "k_function",
    "krige",
    "load_catalog",
    "scan",
    "simulate",
]
