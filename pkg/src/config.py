import os
from typing import List, Optional

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _optional_int(name: str) -> Optional[int]:
    value = os.getenv(name, "")
    return int(value) if value else None


def _names(name: str) -> List[str]:
    return [v.strip() for v in os.getenv(name, "").split(",") if v.strip()]


class Settings:
    """Application configuration settings"""

    # Discretization
    N_BINS: int = int(os.getenv("N_BINS", "4"))
    # Columns read as booleans when every cell is true/false/0/1
    BOOLEAN_COLUMNS: List[str] = _names("BOOLEAN_COLUMNS")

    # Candidate exploration budget
    MAX_PARENT_SET_SIZE: int = int(os.getenv("MAX_PARENT_SET_SIZE", "3"))
    MAX_CANDIDATES_PER_NODE: int = int(os.getenv("MAX_CANDIDATES_PER_NODE", "20"))
    MAX_EXPANSIONS_PER_NODE: int = int(os.getenv("MAX_EXPANSIONS_PER_NODE", "500"))

    # Genetic algorithm
    GA_K: int = int(os.getenv("GA_K", "20"))
    GA_MAX_GEN: int = int(os.getenv("GA_MAX_GEN", "100"))
    GA_PATIENCE: int = int(os.getenv("GA_PATIENCE", "10"))
    GA_PLATEAU: float = float(os.getenv("GA_PLATEAU", "1e-6"))
    GA_TAU: Optional[int] = _optional_int("GA_TAU")
    GA_C: float = float(os.getenv("GA_C", "1e-3"))
    GA_MUTATION_RATE: float = float(os.getenv("GA_MUTATION_RATE", "0.05"))
    GA_MAX_INITIAL_PARENTS: int = int(os.getenv("GA_MAX_INITIAL_PARENTS", "12"))

    # Inference and evaluation
    CPT_ALPHA: float = float(os.getenv("CPT_ALPHA", "1.0"))
    DECISION_THRESHOLD: float = float(os.getenv("DECISION_THRESHOLD", "0.5"))
    TREE_MAX_DEPTH: int = int(os.getenv("TREE_MAX_DEPTH", "5"))
    TEST_FRACTION: float = float(os.getenv("TEST_FRACTION", "0.2"))

    # Runtime
    JOBS: int = int(os.getenv("JOBS", str(os.cpu_count() or 1)))
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    def validate(self):
        """Validate configuration ranges"""
        if self.N_BINS < 2:
            raise ValueError("N_BINS must be at least 2")
        if min(self.MAX_PARENT_SET_SIZE, self.MAX_CANDIDATES_PER_NODE, self.MAX_EXPANSIONS_PER_NODE) < 1:
            raise ValueError("exploration budgets must be at least 1")
        if self.GA_K < 2:
            raise ValueError("GA_K must be at least 2")
        if self.GA_PATIENCE < 1 or self.GA_MAX_GEN < 1:
            raise ValueError("GA_PATIENCE and GA_MAX_GEN must be at least 1")
        if self.GA_PLATEAU < 0 or self.GA_C < 0:
            raise ValueError("GA_PLATEAU and GA_C must be non-negative")
        if self.GA_TAU is not None and self.GA_TAU < 1:
            raise ValueError("GA_TAU must be at least 1")
        if not 0.0 <= self.GA_MUTATION_RATE <= 1.0:
            raise ValueError("GA_MUTATION_RATE must lie in [0, 1]")
        if self.CPT_ALPHA < 0:
            raise ValueError("CPT_ALPHA must be non-negative")
        if not 0.0 < self.DECISION_THRESHOLD < 1.0:
            raise ValueError("DECISION_THRESHOLD must lie in (0, 1)")
        if not 0.0 < self.TEST_FRACTION < 1.0:
            raise ValueError("TEST_FRACTION must lie in (0, 1)")
        if self.JOBS < 1:
            raise ValueError("JOBS must be at least 1")


settings = Settings()
