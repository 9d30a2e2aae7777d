from src.utils.output_manager import OutputManager
from src.utils.workers import VerifyWorker, run_cases

__all__ = ['OutputManager', 'VerifyWorker', 'run_cases']
