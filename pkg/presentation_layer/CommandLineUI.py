# presentation_layer/CommandLineUI.py

import argparse
import os
import sys

# Add root directory to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

# Import Business Layer Controllers
from business_layer.ExportController import ExportController
from business_layer.LoggingService import LoggingService
from business_layer.SimulationController import SimulationController

# Import Data Layer
from data_layer.ConfigManager import ConfigManager
from data_layer.FileHandler import FileHandler

from models import ConfigError


EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3


class CommandLineUI:
    """
    Main Presentation Layer Class
    The simulate and validate-config commands
    """

    def __init__(self):
        # Initialize Data Layer
        self.file_handler = FileHandler()
        self.config_manager = ConfigManager(self.file_handler)

        # Initialize Business Layer
        self.logging_service = LoggingService()
        self.export_controller = ExportController(self.file_handler, self.logging_service)

        self.parser = self._build_parser()

    def _build_parser(self):
        parser = argparse.ArgumentParser(
            prog="cellfree-handover",
            description="Monte Carlo simulator for handover in mobile cell-free massive MIMO"
        )
        commands = parser.add_subparsers(dest="command", required=True)

        simulate = commands.add_parser("simulate", help="run a seeded campaign and write results")
        simulate.add_argument("--config", required=True, help="flat JSON configuration file")
        simulate.add_argument("--out", required=True, help="output directory")
        simulate.add_argument("--seed", type=int, help="master seed")
        simulate.add_argument("--realizations", type=int, dest="n_realizations",
                              help="number of Monte Carlo realizations")
        simulate.add_argument("--schemes", help="comma-separated scheme ids")
        simulate.add_argument("--duration-s", type=float, dest="duration_s",
                              help="simulated time per realization in seconds")
        simulate.add_argument("--workers", type=int, help="worker processes")

        validate = commands.add_parser("validate-config", help="check a configuration file")
        validate.add_argument("--config", required=True, help="flat JSON configuration file")
        return parser

    def simulate(self, args):
        """Run a campaign and write the output files"""
        overrides = {
            "seed": args.seed,
            "n_realizations": args.n_realizations,
            "schemes": args.schemes,
            "duration_s": args.duration_s,
            "workers": args.workers,
        }
        cfg = self.config_manager.load_config(args.config, overrides)
        self.logging_service.log_operation(None, "config", f"Loaded {args.config}")

        report = SimulationController(cfg, self.logging_service).run_campaign()

        result = self.export_controller.emit_outputs(report, args.out)
        if not result["success"]:
            raise IOError(result["message"])
        self.logging_service.export_logs(os.path.join(args.out, "run_log.txt"))
        # the next command on this instance starts a fresh run log
        self.logging_service.clear_local_logs()
        print(result["message"])
        for scheme, stats in report.schemes.items():
            se = stats["se_mobility"]
            print(f"  {scheme:<10} median SE {se['median']:.4f}  95%-ile {se['p95']:.4f}  "
                  f"h_cluster {stats['h_cluster_mean']:.4f}/s")
        return EXIT_OK

    def validate_config(self, args):
        """Validate a configuration file and print the derived block count"""
        cfg = self.config_manager.load_config(args.config)
        result = self.config_manager.validator.validate_config(cfg)
        for warning in result["warnings"]:
            print(f"warning: {warning}")
        print(f"Configuration valid: {result['info']['num_blocks']} blocks of "
              f"{result['info']['block_duration_s']} s, schemes {','.join(result['info']['schemes'])}")
        return EXIT_OK

    def run(self, argv=None):
        """
        Parse arguments and dispatch

        Returns:
            process exit code: 0 success, 2 configuration error, 3 runtime error
        """
        args = self.parser.parse_args(argv)
        try:
            if args.command == "simulate":
                return self.simulate(args)
            return self.validate_config(args)
        except ConfigError as e:
            print(f"Configuration error: {e}", file=sys.stderr)
            return EXIT_CONFIG_ERROR
        except Exception as e:
            print(f"Error: {e}", file=sys.stderr)
            return EXIT_RUNTIME_ERROR
