"""Admissibility audits through the command line front end."""
from qadmit.cli import main

if __name__ == "__main__":
    for rep in ("signed", "dyadic", "xi-phi"):
        print(f"== {rep}")
        main(["audit", "--rep", rep, "--n-max", "5", "--samples", "6"])
