"""Batch command line interface.

Exit codes: 0 success, 1 analysis findings present, 2 usage or input error.
Every workflow available over the HTTP API is available here with the same
resulting project state.
"""

from __future__ import annotations

import json
import os
import sys
from typing import Optional

import click

from . import authoring, elicitation, monitor, reqstore, semcov, service, testgen
from .elicitation import apply_label, next_question
from .ltlf import LtlfError, render_trace_table
from .monitor import ThresholdConfig
from .project import Project, ProjectError, load_project, save_project
from .reqstore import StoreError, UnformalizedRequirementError, render_report

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2


class CliError(click.ClickException):
    exit_code = EXIT_USAGE


def _load(path: str) -> Project:
    try:
        return load_project(path)
    except FileNotFoundError:
        raise CliError(f"project file not found: {path}")
    except ProjectError as exc:
        raise CliError(str(exc))


def _save(project: Project, path: str) -> None:
    try:
        save_project(project, path)
    except (ProjectError, StoreError) as exc:
        raise CliError(str(exc))


@click.group()
def main():
    """Requirements formalization, analysis, and runtime monitoring."""


@main.command()
@click.option("--project", "path", required=True, type=click.Path())
@click.option("--name", required=True)
@click.option("--prop", "props", multiple=True, metavar="NAME=CAPTION",
              help="Vocabulary entry; repeatable.")
@click.option("--threshold", type=float, default=monitor.DEFAULT_THRESHOLD,
              show_default=True, help="Default score threshold.")
def init(path, name, props, threshold):
    """Create a new project file."""
    if os.path.exists(path):
        raise CliError(f"refusing to overwrite existing file: {path}")
    vocabulary = {}
    for entry in props:
        if "=" not in entry:
            raise CliError(f"bad --prop (expected NAME=CAPTION): {entry!r}")
        prop_name, caption = entry.split("=", 1)
        vocabulary[prop_name.strip()] = caption.strip()
    try:
        project = Project(name=name, vocabulary=vocabulary,
                          threshold=ThresholdConfig(default=threshold))
    except (LtlfError, monitor.MonitorError) as exc:
        raise CliError(str(exc))
    _save(project, path)
    click.echo(f"created {path} with {len(vocabulary)} propositions")


@main.command("add-req")
@click.option("--project", "path", required=True, type=click.Path())
@click.option("--id", "req_id", required=True)
@click.option("--text", required=True)
def add_req(path, req_id, text):
    """Add a free-English requirement."""
    project = _load(path)
    try:
        project.add_requirement(req_id, text)
    except ProjectError as exc:
        raise CliError(str(exc))
    _save(project, path)
    click.echo(f"added {req_id}")


@main.command()
@click.option("--project", "path", required=True, type=click.Path())
@click.option("--req", "req_id", required=True)
@click.option("--provider", type=click.Choice(["stub", "http"]), default="stub",
              show_default=True)
@click.option("--endpoint", default="", help="Chat-completion endpoint (http provider).")
@click.option("--model", default="")
@click.option("--max-candidates", type=int, default=5, show_default=True)
def author(path, req_id, provider, endpoint, model, max_candidates):
    """Generate Restricted English candidates for a requirement."""
    project = _load(path)
    try:
        req = project.requirement(req_id)
    except ProjectError as exc:
        raise CliError(str(exc))
    config = authoring.ProviderConfig(kind=provider, endpoint=endpoint, model=model)
    try:
        result = authoring.author_candidates(
            authoring.AuthoringRequest(
                source_text=req.source_text,
                vocabulary=project.vocabulary,
                max_candidates=max_candidates,
            ),
            config=config,
        )
    except authoring.AuthoringError as exc:
        raise CliError(str(exc))
    req.candidates = result.candidates
    req.status = reqstore.AUTHORING
    req.selected = None
    project.sessions.pop(req_id, None)
    _save(project, path)
    for i, cand in enumerate(req.candidates):
        click.echo(f"[{i}] {cand.re_text}")
        click.echo(f"    {cand.formula}")
    for diag in result.diagnostics:
        click.echo(f"note: {diag}", err=True)


@main.command()
@click.option("--project", "path", required=True, type=click.Path())
@click.option("--req", "req_id", required=True)
def validate(path, req_id):
    """Interactively disambiguate candidates (a = accept, r = reject)."""
    project = _load(path)
    try:
        req = project.requirement(req_id)
    except ProjectError as exc:
        raise CliError(str(exc))
    if not req.candidates:
        raise CliError(f"requirement {req_id!r} has no candidates; run author first")
    session = project.session_for(req_id)
    req.status = reqstore.VALIDATING
    while session.status == elicitation.OPEN:
        question = next_question(session)
        if question is None:
            break
        trace, pair = question
        click.echo("\nDoes this behavior satisfy the requirement?")
        click.echo(render_trace_table(trace))
        click.echo(f"(distinguishes candidates {pair[0]} and {pair[1]})")
        answer = ""
        while answer not in ("a", "r"):
            answer = click.prompt("accept or reject [a/r]", default="",
                                  show_default=False).strip().lower()
        label = elicitation.ACCEPT if answer == "a" else elicitation.REJECT
        apply_label(session, trace, label)
        _save(project, path)
    if session.status == elicitation.CONVERGED and session.selected_index is not None:
        req.select(session.selected_index)
        click.echo(f"\nconverged after {elicitation.questions_asked(session)} question(s)")
        click.echo(f"selected: {req.candidates[session.selected_index].re_text}")
    elif session.status == elicitation.EXHAUSTED:
        click.echo("\nall candidates pruned; re-run author with more interpretations")
    _save(project, path)


@main.command()
@click.option("--project", "path", required=True, type=click.Path())
def analyze(path):
    """Consistency, conflict, redundancy, and vacuity analysis.

    Exits 1 when findings are present."""
    project = _load(path)
    try:
        report = reqstore.analyze(project.requirements)
    except UnformalizedRequirementError as exc:
        raise CliError(str(exc))
    click.echo(render_report(report))
    if report.has_findings():
        sys.exit(EXIT_FINDINGS)


@main.command("testgen")
@click.option("--project", "path", required=True, type=click.Path())
@click.option("--req", "req_id", required=True)
@click.option("--criterion", type=click.Choice([testgen.STATE_COVERAGE,
                                                testgen.TRANSITION_COVERAGE]),
              default=testgen.TRANSITION_COVERAGE, show_default=True)
@click.option("--out", type=click.Path(), default="-",
              help="Output file for the suite (JSON lines); - for stdout.")
def testgen_cmd(path, req_id, criterion, out):
    """Generate a structural-coverage test suite for a requirement."""
    project = _load(path)
    try:
        formula = project.requirement(req_id).selected_formula()
        suite = testgen.generate_suite(formula, criterion=criterion,
                                       requirement_id=req_id, props=project.props)
    except (ProjectError, StoreError, testgen.TestgenError) as exc:
        raise CliError(str(exc))
    if out == "-":
        testgen.export_suite(suite, sys.stdout, captions=project.vocabulary)
    else:
        with open(out, "w") as handle:
            testgen.export_suite(suite, handle, captions=project.vocabulary)
        click.echo(f"wrote {len(suite.cases)} case(s) to {out} "
                   f"(coverage {suite.coverage_ratio:.2f})", err=True)


@main.command("monitor")
@click.option("--project", "path", required=True, type=click.Path())
@click.option("--req", "req_ids", multiple=True,
              help="Requirement id; repeatable. Default: all formalized.")
@click.option("--scores", "scores_path", default="-",
              help="Scores JSON-lines file; - for stdin.")
@click.option("--out", type=click.Path(), default="-",
              help="Verdict JSON-lines output; - for stdout.")
@click.option("--figures", type=click.Path(), default=None,
              help="Directory to render verdict timeline figures into.")
def monitor_cmd(path, req_ids, scores_path, out, figures):
    """Threshold a score stream and emit per-frame verdicts."""
    project = _load(path)
    if not req_ids:
        req_ids = tuple(r.id for r in project.requirements if r.selected is not None)
    if not req_ids:
        raise CliError("no formalized requirements to monitor")
    formulas = []
    for rid in req_ids:
        try:
            formulas.append((rid, project.requirement(rid).selected_formula()))
        except (ProjectError, StoreError) as exc:
            raise CliError(str(exc))

    if scores_path == "-":
        lines = sys.stdin.readlines()
    else:
        try:
            with open(scores_path) as handle:
                lines = handle.readlines()
        except OSError as exc:
            raise CliError(str(exc))
    try:
        records = monitor.parse_score_lines(lines)
        scan = monitor.scan_offline(records, formulas, project.props,
                                    config=project.threshold)
    except monitor.MonitorError as exc:
        raise CliError(str(exc))

    if out == "-":
        monitor.write_verdict_lines(scan.verdicts, sys.stdout)
    else:
        with open(out, "w") as handle:
            monitor.write_verdict_lines(scan.verdicts, handle)
        click.echo(f"wrote {len(scan.verdicts)} verdict line(s) to {out}", err=True)
    for seg in scan.segments:
        click.echo(
            f"flagged: {seg.requirement_id} frames {seg.start_frame}-{seg.end_frame}",
            err=True,
        )
    if figures:
        from . import report as report_mod

        os.makedirs(figures, exist_ok=True)
        fig_path = report_mod.render_verdict_timeline(
            scan.verdicts, os.path.join(figures, "verdicts.png"))
        click.echo(f"figure: {fig_path}", err=True)


@main.command()
@click.option("--project", "path", required=True, type=click.Path())
@click.option("--scores", "scores_path", default="-",
              help="Scores JSON-lines file; - for stdin.")
@click.option("--csv", "csv_path", default=None,
              help="Alternative input: long-format CSV (item,feature,score).")
@click.option("--target-ratio", type=float, default=1.0, show_default=True)
@click.option("--group", "groups", multiple=True, metavar="ITEM=GROUP",
              help="Concept grouping entry; repeatable.")
@click.option("--out", type=click.Path(), default="-",
              help="JSON report output; - for stdout.")
@click.option("--figures", type=click.Path(), default=None,
              help="Directory to render coverage figures into.")
def coverage(path, scores_path, csv_path, target_ratio, groups, out, figures):
    """Semantic feature coverage report over a score matrix."""
    project = _load(path)
    try:
        if csv_path:
            with open(csv_path) as handle:
                matrix = semcov.matrix_from_csv(handle)
        else:
            lines = sys.stdin.readlines() if scores_path == "-" else open(scores_path).readlines()
            matrix = semcov.matrix_from_score_lines(lines)
        grouping = {}
        for entry in groups:
            if "=" not in entry:
                raise CliError(f"bad --group (expected ITEM=GROUP): {entry!r}")
            item, group = entry.split("=", 1)
            grouping[item.strip()] = group.strip()
        thresholds = {f: project.threshold.tau(f) for f in matrix.features}
        report = semcov.coverage(matrix, thresholds, target_ratio)
        profiles = semcov.build_profile(matrix, grouping)
    except (semcov.SemcovError, monitor.MonitorError, OSError) as exc:
        raise CliError(str(exc))

    if out == "-":
        semcov.write_report_json(report, profiles, sys.stdout)
    else:
        with open(out, "w") as handle:
            semcov.write_report_json(report, profiles, handle)
        click.echo(f"wrote report to {out}", err=True)
    if profiles:
        click.echo(semcov.render_heatmap_text(profiles), err=True)
    if figures:
        from . import report as report_mod

        os.makedirs(figures, exist_ok=True)
        paths = [report_mod.render_coverage_figure(
            report, os.path.join(figures, "coverage.png"))]
        if profiles:
            paths.append(report_mod.render_profile_heatmap(
                profiles, os.path.join(figures, "profiles.png")))
        for fig_path in paths:
            click.echo(f"figure: {fig_path}", err=True)


@main.command()
@click.option("--host", default=service.DEFAULT_HOST, show_default=True)
@click.option("--port", type=int, default=service.DEFAULT_PORT, show_default=True)
@click.option("--data-dir", type=click.Path(), default=None,
              help=f"Project directory (default: ${service.DATA_DIR_ENV} or cwd).")
def serve(host, port, data_dir):
    """Run the HTTP/JSON service."""
    service.serve(host=host, port=port, data_dir=data_dir)


if __name__ == "__main__":
    main()
