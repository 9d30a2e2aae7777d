import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from src.core.envelope import Check
from src.special.errors import StieltjesError

logger = logging.getLogger(__name__)


class VerifyWorker:
    """Runs one verification case and reports its checks"""

    def __init__(self, index, name, case, finished=None):
        self.index = index
        self.name = name
        self.case = case
        self.finished = finished

    def run(self):
        """Run the case; library failures become a failed check"""
        try:
            checks = list(self.case())
        except (StieltjesError, ArithmeticError, np.linalg.LinAlgError) as e:
            logger.warning("case %s failed: %s", self.name, e)
            checks = [Check.failure(self.name, e)]

        if self.finished is not None:
            self.finished(self.index, checks)
        return checks


def run_cases(cases, jobs=1, finished=None):
    """Run (name, callable) cases, merged in case order"""
    workers = [VerifyWorker(i, name, case, finished) for i, (name, case) in enumerate(cases)]
    if jobs <= 1 or len(workers) <= 1:
        results = [worker.run() for worker in workers]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(VerifyWorker.run, workers))
    return [check for checks in results for check in checks]
