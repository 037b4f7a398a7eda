"""Regenerate the data behind every theory figure into DEBROGLIE_OUTPUT_DIR."""

import json

from debroglie import experiments
from debroglie.cli import RunConfig, cmd_fringe, cmd_hom, cmd_packet, write_report
from debroglie.logging import configure_logging
from debroglie.settings import settings


def main():
    configure_logging()
    written = cmd_hom(RunConfig(command="hom"))
    written += cmd_fringe(RunConfig(command="fringe"))
    for source in ("spdc", "separable", "distinguishable"):
        written += cmd_packet(RunConfig(command="packet", source=source, out=f"packet_{source}.csv"))
    study = experiments.pump_convergence()
    written.append(
        write_report(
            {**study.model_dump(mode="json"), "monotone": study.monotone},
            settings.resolve_output("pump_convergence.json"),
        )
    )
    print(json.dumps({"status": "ok", "outputs": [str(p) for p in written]}, indent=2))


if __name__ == "__main__":
    main()
