# =============================================================================
# MAIN ENTRY POINT
# =============================================================================

import sys
from src.core.app import StieltjesApp

if __name__ == "__main__":
    app = StieltjesApp()
    sys.exit(app.run())
