"""Write the scikit-learn handwritten digits data as a headerless CSV."""
import sys

import numpy as np
from sklearn.datasets import load_digits


def main() -> None:
    out = sys.argv[1] if len(sys.argv) > 1 else "data/digits.csv"
    data = load_digits().data.astype(int)
    np.savetxt(out, data, fmt="%d", delimiter=",")
    print(f"wrote {data.shape[0]} rows x {data.shape[1]} columns to {out}")


if __name__ == "__main__":
    main()
