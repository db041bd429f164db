#!/usr/bin/env python
"""Human-readable summaries of pipeline reports and expansion certificates.

Templates are Jinja2 files shipped in ``hamdecomp/templates``; callers may
pass their own template file instead. Templates receive the ``to_dict()``
form of the object as ``report`` or ``certificate``.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from jinja2 import Environment, Template, TemplateError

from .errors import HamDecompError
from .expansion import ExpanderCertificate
from .pipeline import PipelineReport

logger = logging.getLogger(__name__)

TEMPLATE_DIR = Path(__file__).parent / "templates"


def load_template(name: str, custom: Optional[Union[str, Path]] = None) -> Template:
    """Load a bundled template, or a custom one when given.

    Args:
        name: File name under the bundled template directory.
        custom: Optional path of a replacement template.

    Returns:
        Compiled template.

    Raises:
        HamDecompError: If the template is missing or does not compile.
    """
    path = Path(custom) if custom is not None else TEMPLATE_DIR / name
    if not path.exists():
        raise HamDecompError(f"Template not found: {path}")
    if custom is not None:
        logger.info(f"Using custom template: {path}")
    # plain-text output, autoescaping does not apply
    env = Environment(trim_blocks=True, lstrip_blocks=True)  # nosec B701
    try:
        return env.from_string(path.read_text(encoding="utf-8"))
    except TemplateError as e:
        raise HamDecompError(f"Invalid template {path}: {e}") from e


def _render(template: Template, **context: Dict[str, Any]) -> str:
    try:
        return template.render(**context)
    except TemplateError as e:
        raise HamDecompError(f"Template rendering failed: {e}") from e


def render_report(report: PipelineReport, template: Optional[Union[str, Path]] = None) -> str:
    """Render a pipeline report as text."""
    return _render(load_template("report.txt.jinja2", template), report=report.to_dict())


def render_certificate(
    certificate: ExpanderCertificate, template: Optional[Union[str, Path]] = None
) -> str:
    """Render an expansion certificate as text."""
    return _render(
        load_template("certificate.txt.jinja2", template), certificate=certificate.to_dict()
    )
