"""Run every bundled scenario and collect artifacts plus a comparison table.

Each preset gets trajectory/shape CSVs, an SVG plot, and an equilibrium
analysis under <out>/<name>/.  The table at the end compares the
equilibrium-based prediction against the motion classified from the run.
"""

import argparse
from pathlib import Path

from cbpursuit import get_preset, graph_params_from_config, preset_names, scenario_from_config
from cbpursuit.cli import run_analyze, run_simulate


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/figures")
    parser.add_argument("--preset", action="append",
                        help="run only these presets (repeatable)")
    args = parser.parse_args()

    names = args.preset or preset_names()
    rows = []
    for name in names:
        doc = get_preset(name)
        out_dir = Path(args.out) / name
        _, graph, params = graph_params_from_config(doc)
        analysis = run_analyze(name, graph, params, out_dir, echo=print)
        result = run_simulate(scenario_from_config(doc), out_dir, echo=print)
        rows.append((name, analysis["predicted_behavior"], result.behavior,
                     result.termination.value))
        print()

    print(f"{'preset':<8} {'predicted':<12} {'simulated':<12} termination")
    for name, predicted, simulated, termination in rows:
        # fig3a has no admissible equilibrium, so prediction stays "none"
        # even though the branch orbit is periodic
        flag = "" if predicted == simulated else "  <- differs"
        print(f"{name:<8} {predicted:<12} {simulated:<12} {termination}{flag}")


if __name__ == "__main__":
    main()
