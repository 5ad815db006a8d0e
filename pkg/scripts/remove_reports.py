# Script to rm the `reports` and `domination` output dirs
#
# Created On: Oct 19, 2026
#
# Use it from the root by the following cmd
#   `env/bin/python3 scripts/remove_reports.py`

from pathlib import Path
import shutil

ROOT_DIR = Path(__file__).parent.resolve().parent
OUTPUT_DIRS = [ROOT_DIR / "reports", ROOT_DIR / "domination"]

def remove_outputs(dirs=OUTPUT_DIRS):
    for out in dirs:
        if out.exists() and out.is_dir():
            shutil.rmtree(out)
            print(f"Directory {out} and its contents have been deleted.")
        else:
            print(f"Directory {out} does not exist.")

def main():
    remove_outputs()

if __name__ == '__main__':
    main()
