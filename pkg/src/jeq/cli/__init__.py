"""Command line front end: problem files, subcommand dispatch and report emission."""

from jeq.cli.parse_config_implementation import ProblemConfig, ProblemFields, load_fields, parse_config
from jeq.cli.emit_report_implementation import emit_report, render_report
from jeq.cli.dispatch_implementation import (
    SUBCOMMANDS,
    SubsolutionReport,
    build_parser,
    configure_logging,
    dispatch,
    main,
    subsolution_report,
)
