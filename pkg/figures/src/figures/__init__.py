"""Figure rendering for nessie CSV outputs."""

__version__ = "0.1.0"

from .recipes import FigureRecipe, Panel, RecipeError, SchemaMismatch, load_recipe
from .render import curve_maxima, render
