import os
import json
import logging

logger = logging.getLogger(__name__)


class Config:
    """Tolerances, defaults and persisted settings"""

    # Continued fractions
    CONVERGENT_RESCALE = 1e150
    POLE_THRESHOLD = 1e-300
    TREND_LEVELING = 1e-3
    TREND_GROWING = 1e-1

    # Moments and factorization
    HANKEL_PIVOT_TOL = 1e-10
    HAUSDORFF_TOL = 1e-12
    PADE_MATCH_TOL = 1e-9
    EXTENDED_DIGITS = 50
    DEFAULT_PRECISION = "double"
    PRECISIONS = ("double", "extended")

    # Quadrature
    WEIGHT_CROSSCHECK_TOL = 1e-10
    EXACTNESS_TOL = 1e-10
    NODE_SEPARATION_TOL = 1e-12
    TRANSFORM_NODES = 64

    # Electrostatics
    EQUILIBRIUM_TOL = 1e-12
    EQUILIBRIUM_MAX_ITER = 200

    # Elliptic functions
    AGM_TOL = 1e-15
    SERIES_TAIL_TOL = 1e-16
    LAPLACE_CROSSCHECK_TOL = 1e-9
    FOURIER_CROSSCHECK_TOL = 1e-10

    # Verify suites
    VERIFY_TOLERANCE = 1e-12
    CARLITZ_MATCH_TOL = 1e-8
    POSITION_TOL = 1e-8
    ZERO_LAW_TOL = 0.05

    # Family name -> parameter defaults
    AVAILABLE_FAMILIES = {
        "jacobi": {"alpha": 0.0, "beta": 0.0},
        "laguerre": {"alpha": 0.0},
        "hermite": {},
        "legendre": {},
        "chebyshev_t": {},
        "chebyshev_u": {},
        "stieltjes_wigert": {"q": 0.6065306597126334},
        "carlitz_c": {"k": 0.5},
        "carlitz_d": {"k": 0.5},
    }

    OUTPUT_FORMATS = ("json", "csv")
    LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"

    # Keys a settings file may override
    TUNABLE_KEYS = (
        "CONVERGENT_RESCALE", "POLE_THRESHOLD", "TREND_LEVELING", "TREND_GROWING",
        "HANKEL_PIVOT_TOL", "HAUSDORFF_TOL", "PADE_MATCH_TOL", "EXTENDED_DIGITS",
        "DEFAULT_PRECISION", "WEIGHT_CROSSCHECK_TOL", "EXACTNESS_TOL",
        "TRANSFORM_NODES", "EQUILIBRIUM_TOL", "EQUILIBRIUM_MAX_ITER",
        "LAPLACE_CROSSCHECK_TOL", "FOURIER_CROSSCHECK_TOL",
        "VERIFY_TOLERANCE", "CARLITZ_MATCH_TOL", "POSITION_TOL", "ZERO_LAW_TOL",
    )

    # Settings file path
    SETTINGS_FILE = os.environ.get(
        "STIELTJES_SETTINGS",
        os.path.join(os.path.expanduser("~"), ".stieltjes_settings.json"),
    )
    SEED_VARIABLE = "STIELTJES_SEED"

    @classmethod
    def load_settings(cls, path=None):
        """Load overrides from the settings file"""
        path = path or cls.SETTINGS_FILE
        try:
            if os.path.exists(path):
                with open(path, 'r', encoding='utf-8') as f:
                    settings = json.load(f)

                for key, value in settings.items():
                    attr = key.upper()
                    if attr in cls.TUNABLE_KEYS:
                        setattr(cls, attr, value)
                    else:
                        logger.warning("Ignoring unknown setting %r in %s", key, path)

                return settings
        except (OSError, ValueError) as e:
            logger.error("Error loading settings: %s", e)
        return {}

    @classmethod
    def save_settings(cls, path=None, **values):
        """Merge values into the settings file"""
        path = path or cls.SETTINGS_FILE
        settings = {}

        # Load existing settings first
        if os.path.exists(path):
            try:
                with open(path, 'r', encoding='utf-8') as f:
                    settings = json.load(f)
            except (OSError, ValueError):
                settings = {}

        for key, value in values.items():
            attr = key.upper()
            if attr not in cls.TUNABLE_KEYS:
                raise KeyError(f"unknown setting {key!r}")
            settings[key.lower()] = value
            setattr(cls, attr, value)

        try:
            with open(path, 'w', encoding='utf-8') as f:
                json.dump(settings, f, indent=2)
            logger.info("Settings saved to %s", path)
        except OSError as e:
            logger.error("Error saving settings: %s", e)
        return settings

    @classmethod
    def get_seed(cls):
        """Seed from the environment, reserved for randomized suites"""
        raw = os.environ.get(cls.SEED_VARIABLE)
        if raw is None:
            return None
        try:
            return int(raw)
        except ValueError:
            logger.warning("%s=%r is not an integer, ignoring", cls.SEED_VARIABLE, raw)
            return None

    @classmethod
    def get_family_defaults(cls, name):
        """Default parameters for a family name"""
        if name not in cls.AVAILABLE_FAMILIES:
            raise KeyError(name)
        return dict(cls.AVAILABLE_FAMILIES[name])

    @classmethod
    def setup_logging(cls, level="WARNING"):
        """Route library logging to stderr"""
        logging.basicConfig(level=getattr(logging, level.upper()),
                            format=cls.LOG_FORMAT, force=True)
