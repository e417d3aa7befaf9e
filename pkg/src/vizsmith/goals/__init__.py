"""Goal exploration: turn a dataset summary into visualization goals."""

from vizsmith.goals.explorer import (
    Goal,
    GoalParseReport,
    build_goal_prompt,
    explore_goals,
    parse_goals,
    parse_goals_report,
)

__all__ = [
    "Goal",
    "GoalParseReport",
    "build_goal_prompt",
    "explore_goals",
    "parse_goals",
    "parse_goals_report",
]
