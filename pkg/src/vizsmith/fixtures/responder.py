"""Deterministic rule-based text provider for fixtures and demos.

Implements the same protocol as a live model but answers every task family
(enrichment, goals, code generation, refinement, repair, evaluation,
explanation, recommendation, correctness scoring) with fixed rules keyed off
request metadata. Used directly as an offline provider and as the recording
source for replay cassettes, so no stale canned transcripts are committed.
"""

from __future__ import annotations

import json
import re

from vizsmith.errors import ProviderUnavailable
from vizsmith.llm.types import GenerationConfig, PromptRequest, ProviderResponse

NUMERIC_TYPES = {"integer", "float"}
CATEGORICAL_TYPES = {"string", "boolean"}

_FIELD_LINE = re.compile(r"^- name: ([^|]+?) \| type: (\w+)", re.MULTILINE)
_SCHEMA_LINE = re.compile(r"^Fields: (.+)$", re.MULTILINE)
_DATASET_LINE = re.compile(r"^Dataset: (.+)$", re.MULTILINE)
_GOAL_JSON = re.compile(r"Visualization goal:\n(\{.*\})")
_VIZ_LINE = re.compile(r"^visualization: (.+)$", re.MULTILINE)
_STUB_BLOCK = re.compile(r"Current stub:\n```\n(.*?)\n```", re.DOTALL)
_CODE_BLOCK = re.compile(r"Code:\n```\n(.*?)\n```", re.DOTALL)
_QUESTION_LINE = re.compile(r"^question: (.+)$", re.MULTILINE)
_QUOTED = re.compile(r"['\"]([^'\"]+)['\"]")
_PRIOR_GOALS = re.compile(r"Goals already explored:\n(\[.*?\])\n\n", re.DOTALL)

HIST = re.compile(r"^histogram of (\S+)$")
BAR = re.compile(r"^bar chart of (\S+) by (\S+)$")
SCATTER = re.compile(r"^scatter plot of (\S+) vs (\S+)$")
LINE = re.compile(r"^line chart of (\S+) over (\S+)$")
BOX = re.compile(r"^box plot of (\S+) by (\S+)$")
COUNT = re.compile(r"^count of records by (\S+)$")
PIE = re.compile(r"^pie chart of (\S+) by (\S+)$")

EVALUATION_BASE_SCORES = {
    "code_accuracy": 9,
    "data_transformation": 8,
    "goal_compliance": 9,
    "visualization_type": 9,
    "data_encoding": 8,
    "aesthetics": 8,
}

PIE_CRITIQUE = (
    "a pie chart makes part-to-part comparison difficult; "
    "a bar chart of the same fields would be more effective"
)


def parse_summary_fields(text: str) -> list[tuple[str, str]]:
    """(name, atomic_type) pairs from a rendered summary inside the prompt."""
    found = _FIELD_LINE.findall(text)
    if found:
        return [(name.strip(), kind) for name, kind in found]
    match = _SCHEMA_LINE.search(text)
    if match:
        return [(name.strip(), "unknown") for name in match.group(1).split(",") if name.strip()]
    return []


_DIRECTIVES = (HIST, BAR, SCATTER, LINE, BOX, COUNT, PIE)
_ENRICHED_FIELD = re.compile(
    r"^- name: ([^|]+?) \| type: (\w+)[^\n]*"
    r"(?:\n  semantic_type: ([^|\n]+?) \| description: ([^\n]*))?",
    re.MULTILINE,
)
_WORD = re.compile(r"[a-z0-9]+")
_NL_STOPWORDS = frozenset(
    "a an and are as at by chart do does each for graph how in is it me of on "
    "or over per plot record records show the to versus vs what whats which with".split()
)


def matches_directive(visualization: str) -> bool:
    return any(rx.match(visualization) for rx in _DIRECTIVES)


def _field_tokens(name: str, semantic: str, description: str) -> set[str]:
    tokens = set(_WORD.findall(name.lower()))
    tokens.update(name.lower().split("_"))
    tokens.update(_WORD.findall(semantic.lower().replace("_", " ")))
    tokens.update(_WORD.findall(description.lower()))
    tokens.discard("")
    return tokens


def nl_fallback_directive(visualization: str, prompt_text: str) -> str:
    """Map free-form goal text onto the nearest strict directive.

    Each field in the prompt's summary is scored by token overlap between the
    goal text and the field's name, semantic type, and description. Loose
    singular/plural matching only; no stemming. Best numeric plus best
    categorical field gives a grouped bar chart, numeric alone a histogram,
    categorical alone a record count.
    """
    goal_tokens = [
        t for t in _WORD.findall(visualization.lower()) if t not in _NL_STOPWORDS
    ]
    if not goal_tokens:
        raise ProviderUnavailable(f"no stub rule for visualization {visualization!r}")
    best_numeric: tuple[int, str] | None = None
    best_categorical: tuple[int, str] | None = None
    for name, kind, semantic, description in _ENRICHED_FIELD.findall(prompt_text):
        name = name.strip()
        tokens = _field_tokens(name, semantic or "", description or "")
        score = sum(
            1
            for tok in goal_tokens
            if tok in tokens or tok.rstrip("s") in tokens or f"{tok}s" in tokens
        )
        if score == 0:
            continue
        if kind in NUMERIC_TYPES:
            if best_numeric is None or score > best_numeric[0]:
                best_numeric = (score, name)
        elif kind in CATEGORICAL_TYPES:
            if best_categorical is None or score > best_categorical[0]:
                best_categorical = (score, name)
    if best_numeric and best_categorical:
        return f"bar chart of {best_numeric[1]} by {best_categorical[1]}"
    if best_numeric:
        return f"histogram of {best_numeric[1]}"
    if best_categorical:
        return f"count of records by {best_categorical[1]}"
    raise ProviderUnavailable(f"no stub rule for visualization {visualization!r}")


def plan_directives(fields: list[tuple[str, str]], n: int) -> list[tuple[str, str, str]]:
    """Deterministic (question, visualization, rationale) triples.

    With no parseable fields the plan references invented names, which the
    downstream hallucination filter rejects wholesale.
    """
    numeric = [name for name, kind in fields if kind in NUMERIC_TYPES]
    categorical = [name for name, kind in fields if kind in CATEGORICAL_TYPES]
    dates = [name for name, kind in fields if kind == "date"]
    names = [name for name, _ in fields]
    plans: list[tuple[str, str, str]] = []
    if not fields:
        for i in range(n):
            plans.append(
                (
                    f"How does metric_alpha_{i} behave?",
                    f"histogram of metric_alpha_{i}",
                    f"a histogram of metric_alpha_{i} shows its spread",
                )
            )
        return plans
    if numeric:
        target = numeric[0]
        plans.append(
            (
                f"How is {target} distributed?",
                f"histogram of {target}",
                f"a histogram of {target} shows the spread and outliers of {target}",
            )
        )
    if numeric and categorical:
        value, group = numeric[0], categorical[0]
        plans.append(
            (
                f"How does {value} differ across {group}?",
                f"bar chart of {value} by {group}",
                f"mean {value} per {group} makes group differences visible",
            )
        )
    if len(numeric) >= 2:
        a, b = numeric[0], numeric[1]
        plans.append(
            (
                f"Are {a} and {b} related?",
                f"scatter plot of {a} vs {b}",
                f"a scatter of {a} against {b} exposes their relationship",
            )
        )
    if numeric and dates:
        value, when = numeric[0], dates[0]
        plans.append(
            (
                f"How does {value} change over {when}?",
                f"line chart of {value} over {when}",
                f"a line over {when} reveals the trend of {value}",
            )
        )
    if numeric and categorical:
        value, group = numeric[-1], categorical[0]
        plans.append(
            (
                f"How does the spread of {value} vary by {group}?",
                f"box plot of {value} by {group}",
                f"boxes of {value} per {group} compare medians and spread",
            )
        )
    for name in names:
        plans.append(
            (
                f"How many records fall in each {name}?",
                f"count of records by {name}",
                f"record counts per {name} show its distribution",
            )
        )
    seen: set[str] = set()
    unique = []
    for plan in plans:
        if plan[1] not in seen:
            seen.add(plan[1])
            unique.append(plan)
    return unique[:n]


def _chart_json_stub(visualization: str) -> str:
    def spec(mark: str, x: dict, y: dict | None, title: str) -> str:
        doc: dict = {"mark": mark, "encoding": {"x": x}, "title": title}
        if y is not None:
            doc["encoding"]["y"] = y
        return json.dumps(doc, indent=2, sort_keys=True)

    if m := HIST.match(visualization):
        f = m.group(1)
        return spec(
            "bar",
            {"field": f, "type": "quantitative", "bin": True},
            {"field": f, "aggregate": "count", "type": "quantitative"},
            f"Distribution of {f}",
        )
    if m := BAR.match(visualization):
        value, group = m.groups()
        return spec(
            "bar",
            {"field": group, "type": "nominal"},
            {"field": value, "aggregate": "mean", "type": "quantitative"},
            f"Mean {value} by {group}",
        )
    if m := SCATTER.match(visualization):
        a, b = m.groups()
        return spec(
            "point",
            {"field": a, "type": "quantitative"},
            {"field": b, "type": "quantitative"},
            f"{a} vs {b}",
        )
    if m := LINE.match(visualization):
        value, when = m.groups()
        return spec(
            "line",
            {"field": when, "type": "temporal"},
            {"field": value, "type": "quantitative"},
            f"{value} over {when}",
        )
    if m := BOX.match(visualization):
        value, group = m.groups()
        return spec(
            "boxplot",
            {"field": group, "type": "nominal"},
            {"field": value, "type": "quantitative"},
            f"Spread of {value} by {group}",
        )
    if m := PIE.match(visualization):
        value, group = m.groups()
        return spec(
            "arc",
            {"field": group, "type": "nominal"},
            {"field": value, "aggregate": "sum", "type": "quantitative"},
            f"{value} share by {group}",
        )
    if m := COUNT.match(visualization):
        f = m.group(1)
        return spec(
            "bar",
            {"field": f, "type": "nominal"},
            {"field": f, "aggregate": "count", "type": "quantitative"},
            f"Record count by {f}",
        )
    raise ProviderUnavailable(f"no stub rule for visualization {visualization!r}")


def _python_stub(visualization: str, seaborn: bool) -> str:
    if m := HIST.match(visualization):
        f = m.group(1)
        draw = (
            f'    sns.histplot(data=data, x="{f}", ax=ax)'
            if seaborn
            else f'    ax.hist(data["{f}"].dropna())'
        )
        return "\n".join(
            [
                "    fig, ax = plt.subplots()",
                draw,
                f'    ax.set_xlabel("{f}")',
                '    ax.set_ylabel("count")',
                f'    ax.set_title("Distribution of {f}")',
                "    return fig",
            ]
        )
    if m := BAR.match(visualization):
        value, group = m.groups()
        lines = [
            f'    grouped = data.groupby("{group}", as_index=False)["{value}"].mean()',
            "    fig, ax = plt.subplots()",
        ]
        if seaborn:
            lines.append(f'    sns.barplot(data=grouped, x="{group}", y="{value}", ax=ax)')
        else:
            lines.append(
                f'    ax.bar([str(v) for v in grouped["{group}"]], grouped["{value}"])'
            )
        lines += [
            f'    ax.set_xlabel("{group}")',
            f'    ax.set_ylabel("mean {value}")',
            f'    ax.set_title("Mean {value} by {group}")',
            "    return fig",
        ]
        return "\n".join(lines)
    if m := SCATTER.match(visualization):
        a, b = m.groups()
        draw = (
            f'    sns.scatterplot(data=data, x="{a}", y="{b}", ax=ax)'
            if seaborn
            else f'    ax.scatter(data["{a}"], data["{b}"])'
        )
        return "\n".join(
            [
                "    fig, ax = plt.subplots()",
                draw,
                f'    ax.set_xlabel("{a}")',
                f'    ax.set_ylabel("{b}")',
                f'    ax.set_title("{a} vs {b}")',
                "    return fig",
            ]
        )
    if m := LINE.match(visualization):
        value, when = m.groups()
        draw = (
            f'    sns.lineplot(data=ordered, x="{when}", y="{value}", ax=ax)'
            if seaborn
            else f'    ax.plot(ordered["{when}"], ordered["{value}"])'
        )
        return "\n".join(
            [
                f'    ordered = data.sort_values("{when}")',
                "    fig, ax = plt.subplots()",
                draw,
                f'    ax.set_xlabel("{when}")',
                f'    ax.set_ylabel("{value}")',
                f'    ax.set_title("{value} over {when}")',
                "    fig.autofmt_xdate()",
                "    return fig",
            ]
        )
    if m := BOX.match(visualization):
        value, group = m.groups()
        if seaborn:
            return "\n".join(
                [
                    "    fig, ax = plt.subplots()",
                    f'    sns.boxplot(data=data, x="{group}", y="{value}", ax=ax)',
                    f'    ax.set_title("Spread of {value} by {group}")',
                    "    return fig",
                ]
            )
        return "\n".join(
            [
                "    names, values = [], []",
                f'    for key, group in data.groupby("{group}"):',
                "        names.append(str(key))",
                f'        values.append(group["{value}"].dropna().values)',
                "    fig, ax = plt.subplots()",
                "    ax.boxplot(values)",
                "    ax.set_xticklabels(names)",
                f'    ax.set_xlabel("{group}")',
                f'    ax.set_ylabel("{value}")',
                f'    ax.set_title("Spread of {value} by {group}")',
                "    return fig",
            ]
        )
    if m := PIE.match(visualization):
        value, group = m.groups()
        return "\n".join(
            [
                f'    grouped = data.groupby("{group}")["{value}"].sum()',
                "    fig, ax = plt.subplots()",
                "    ax.pie(grouped.values, labels=[str(v) for v in grouped.index])",
                f'    ax.set_title("{value} share by {group}")',
                "    return fig",
            ]
        )
    if m := COUNT.match(visualization):
        f = m.group(1)
        if seaborn:
            return "\n".join(
                [
                    "    fig, ax = plt.subplots()",
                    f'    sns.countplot(data=data.astype({{"{f}": str}}), x="{f}", ax=ax)',
                    f'    ax.set_title("Record count by {f}")',
                    "    return fig",
                ]
            )
        return "\n".join(
            [
                f'    counts = data["{f}"].astype(str).value_counts()',
                "    fig, ax = plt.subplots()",
                "    ax.bar([str(v) for v in counts.index], counts.values)",
                f'    ax.set_xlabel("{f}")',
                '    ax.set_ylabel("count")',
                f'    ax.set_title("Record count by {f}")',
                "    return fig",
            ]
        )
    raise ProviderUnavailable(f"no stub rule for visualization {visualization!r}")


def build_stub(visualization: str, grammar_id: str) -> str:
    if grammar_id == "chart-json":
        return _chart_json_stub(visualization)
    if grammar_id == "matplotlib":
        return _python_stub(visualization, seaborn=False)
    if grammar_id == "seaborn":
        return _python_stub(visualization, seaborn=True)
    raise ProviderUnavailable(f"no stub rules for grammar {grammar_id!r}")


class HeuristicResponder:
    """Offline stand-in for a live model; same protocol, fixed behavior."""

    def generate(self, request: PromptRequest, config: GenerationConfig) -> ProviderResponse:
        meta = request.metadata_dict()
        task = meta.get("task", "")
        handler = getattr(self, f"_handle_{task.replace('-', '_')}", None)
        if handler is None:
            raise ProviderUnavailable(f"heuristic responder has no rules for task {task!r}")
        texts = handler(request, meta, config)
        texts = list(texts)[: config.n_candidates]
        while len(texts) < config.n_candidates:
            texts.append(texts[-1])
        user_text = request.last_user_text() or ""
        usage = {
            "prompt_tokens": max(1, len(user_text) // 4),
            "completion_tokens": max(1, sum(len(t) for t in texts) // 4),
        }
        return ProviderResponse(candidates=tuple(texts), usage=usage, provider_meta={"backend": "heuristic"})

    # --- task handlers, one per metadata tag ------------------------------

    def _handle_summary_enrichment(self, request, meta, config):
        text = request.last_user_text() or ""
        dataset = meta.get("dataset") or self._dataset_name(text)
        fields = parse_summary_fields(text)
        if dataset == "cars":
            description = "technical specification of cars"
        else:
            description = f"records describing {dataset}"
        entries = []
        for name, kind in fields:
            semantic = "miles_per_gallon" if name == "mpg" else f"{kind}_measure" if kind in NUMERIC_TYPES else f"{kind}_label"
            field_description = (
                "fuel efficiency in miles per gallon"
                if name == "mpg"
                else f"{name} recorded per row"
            )
            entries.append(
                {
                    "name": name,
                    "semantic_type": semantic,
                    "description": field_description,
                }
            )
        reply = json.dumps({"dataset_description": description, "fields": entries}, sort_keys=True)
        return [f"```json\n{reply}\n```"]

    def _handle_goal_generation(self, request, meta, config):
        text = request.last_user_text() or ""
        n_goals = int(meta.get("n_goals", "5"))
        plans = plan_directives(parse_summary_fields(text), n_goals)
        records = [
            {"question": q, "visualization": v, "rationale": r} for q, v, r in plans
        ]
        return [json.dumps(records, sort_keys=True)]

    def _handle_recommendation(self, request, meta, config):
        text = request.last_user_text() or ""
        n_goals = int(meta.get("n_goals", "3"))
        prior: set[str] = set()
        match = _PRIOR_GOALS.search(text)
        if match:
            try:
                prior = {g["visualization"] for g in json.loads(match.group(1))}
            except (ValueError, KeyError, TypeError):
                prior = set()
        plans = plan_directives(parse_summary_fields(text), n_goals + len(prior))
        fresh = [p for p in plans if p[1] not in prior][:n_goals]
        records = [
            {"question": q, "visualization": v, "rationale": r} for q, v, r in fresh
        ]
        return [json.dumps(records, sort_keys=True)]

    def _handle_code_generation(self, request, meta, config):
        grammar_id = meta.get("grammar_id", "")
        visualization = self._directive_for(request)
        stub = build_stub(visualization, grammar_id)
        texts = [stub]
        for i in range(1, config.n_candidates):
            if grammar_id == "chart-json":
                texts.append(stub)
            else:
                texts.append(f"{stub}\n    # variant {i}")
        return texts

    def _handle_refinement(self, request, meta, config):
        grammar_id = meta.get("grammar_id", "")
        instruction = meta.get("instruction", "")
        text = request.last_user_text() or ""
        stub_match = _STUB_BLOCK.search(text)
        stub = stub_match.group(1) if stub_match else ""
        lowered = instruction.lower()
        if "crash" in lowered or "break" in lowered:
            if grammar_id == "chart-json":
                return ["{ this is not valid json"]
            return ['    raise RuntimeError("requested failure")']
        if "title" in lowered:
            quoted = _QUOTED.search(instruction)
            if quoted:
                return [self._retitle(stub, quoted.group(1), grammar_id)]
        if grammar_id == "chart-json":
            return [stub]
        return [f"    # applied: {instruction}\n{stub}"]

    def _handle_repair(self, request, meta, config):
        grammar_id = meta.get("grammar_id", "")
        text = request.last_user_text() or ""
        visualization = self._directive_for(request)
        if PIE.match(visualization) and ("visualization_type" in text or "bar chart" in text):
            value, group = PIE.match(visualization).groups()
            visualization = f"bar chart of {value} by {group}"
        return [build_stub(visualization, grammar_id)]

    def _handle_evaluation(self, request, meta, config):
        dimension = meta.get("dimension", "")
        text = request.last_user_text() or ""
        code_match = _CODE_BLOCK.search(text)
        code = code_match.group(1) if code_match else ""
        is_pie = '"arc"' in code or ".pie(" in code
        score = EVALUATION_BASE_SCORES.get(dimension, 8)
        rationale = "meets the goal with clear encodings and labels"
        if is_pie and dimension == "visualization_type":
            score, rationale = 3, PIE_CRITIQUE
        elif is_pie and dimension == "aesthetics":
            score, rationale = 6, "slice labels crowd each other on small categories"
        return [f"{score}: {rationale}"]

    def _handle_correctness_scoring(self, request, meta, config):
        text = request.last_user_text() or ""
        return ["0.1" if "raise" in text else "0.9"]

    def _handle_explanation(self, request, meta, config):
        text = request.last_user_text() or ""
        question_match = _QUESTION_LINE.search(text)
        question = question_match.group(1) if question_match else "the goal"
        reply = (
            "## Code walkthrough\n"
            "The stub prepares the relevant columns, draws the chart with "
            "labeled axes, sets a descriptive title, and returns the figure "
            "for the scaffold to save.\n\n"
            "## Accessibility description\n"
            f"A chart answering: {question} The axes are labeled with the "
            "field names and the title states the comparison shown.\n"
        )
        return [reply]

    # --- shared extraction helpers -----------------------------------------

    @staticmethod
    def _dataset_name(text: str) -> str:
        match = _DATASET_LINE.search(text)
        return match.group(1).strip() if match else "dataset"

    @staticmethod
    def _goal_visualization(request: PromptRequest) -> str:
        text = request.last_user_text() or ""
        match = _GOAL_JSON.search(text)
        if match:
            try:
                return json.loads(match.group(1))["visualization"]
            except (ValueError, KeyError):
                pass
        line = _VIZ_LINE.search(text)
        if line:
            return line.group(1).strip()
        raise ProviderUnavailable("no visualization goal found in request")

    def _directive_for(self, request: PromptRequest) -> str:
        """Goal visualization text, normalized to a strict directive."""
        visualization = self._goal_visualization(request)
        if matches_directive(visualization):
            return visualization
        return nl_fallback_directive(visualization, request.last_user_text() or "")

    @staticmethod
    def _retitle(stub: str, title: str, grammar_id: str) -> str:
        if grammar_id == "chart-json":
            try:
                spec = json.loads(stub)
            except ValueError:
                return stub
            spec["title"] = title
            return json.dumps(spec, indent=2, sort_keys=True)
        retitled, n_subs = re.subn(
            r'ax\.set_title\("[^"]*"\)', f'ax.set_title("{title}")', stub
        )
        if n_subs:
            return retitled
        lines = stub.splitlines()
        for i, line in enumerate(lines):
            if line.strip() == "return fig":
                lines.insert(i, f'    ax.set_title("{title}")')
                return "\n".join(lines)
        return f'{stub}\n    ax.set_title("{title}")'
