"""Inlier/outlier region plots over the specification box, rendered as SVG."""

import logging

import numpy as np
from reportlab.graphics import renderSVG
from reportlab.graphics.shapes import Circle, Drawing, Group, Rect, String
from reportlab.lib import colors
from scipy import ndimage

from app.config import settings
from app.exceptions import InvalidInputError, PlotDimensionError
from app.models import ProcessWindow, SpecLimits, SvddModel
from app.services.scorer import inlier_mask

logger = logging.getLogger(__name__)


def _check_plane(model: SvddModel, spec: SpecLimits) -> None:
    if model.q != 2 or spec.q != 2:
        raise PlotDimensionError(
            f"region plots need two variables, model has {model.q} and specification {spec.q}"
        )


def grid_centers(spec: SpecLimits, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Cell-center coordinates along x and y for a resolution x resolution grid."""
    if resolution < 1:
        raise InvalidInputError(f"grid resolution must be at least 1, got {resolution}")
    steps = (np.arange(resolution) + 0.5) / resolution
    xs = spec.lsl[0] + steps * (spec.usl[0] - spec.lsl[0])
    ys = spec.lsl[1] + steps * (spec.usl[1] - spec.lsl[1])
    return xs, ys


def score_grid(model: SvddModel, spec: SpecLimits, resolution: int | None = None) -> np.ndarray:
    """Boolean (row = y, column = x) grid, True where the cell center is an inlier."""
    _check_plane(model, spec)
    resolution = settings.grid_resolution if resolution is None else resolution
    xs, ys = grid_centers(spec, resolution)
    xx, yy = np.meshgrid(xs, ys)
    points = np.column_stack((xx.ravel(), yy.ravel()))
    return inlier_mask(model, points).reshape(resolution, resolution)


def inlier_fraction(grid: np.ndarray) -> float:
    return float(np.count_nonzero(grid)) / grid.size


def component_count(grid: np.ndarray) -> int:
    """Number of 4-connected inlier components on the cell grid."""
    _labels, count = ndimage.label(grid)
    return int(count)


class RegionPlotRenderer:
    """Draws a scored grid: inlier cells black, outlier cells gray, spec box red."""

    def __init__(self, size: float = 480.0, margin: float = 36.0):
        self.size = size
        self.margin = margin
        self.inlier_color = colors.black
        self.outlier_color = colors.HexColor("#bdbdbd")
        self.spec_color = colors.HexColor("#d62728")
        self.point_color = colors.HexColor("#8c564b")

    def render(
        self,
        grid: np.ndarray,
        spec: SpecLimits,
        points: ProcessWindow | None = None,
        title: str = "",
    ) -> str:
        """SVG document text; identical inputs give identical output."""
        width_units = float(spec.usl[0] - spec.lsl[0])
        height_units = float(spec.usl[1] - spec.lsl[1])
        scale = self.size / max(width_units, height_units)
        plot_w = width_units * scale
        plot_h = height_units * scale
        drawing = Drawing(plot_w + 2 * self.margin, plot_h + 2 * self.margin)

        drawing.add(self._draw_cells(grid, plot_w, plot_h))
        if points is not None:
            drawing.add(self._draw_points(points, spec, scale))
        drawing.add(self._draw_spec_box(plot_w, plot_h))
        self._draw_labels(drawing, spec, plot_w, plot_h, title)
        return renderSVG.drawToString(drawing)

    def _draw_cells(self, grid: np.ndarray, plot_w: float, plot_h: float) -> Group:
        """One rectangle per horizontal run of equally classified cells."""
        rows, cols = grid.shape
        cell_w = plot_w / cols
        cell_h = plot_h / rows
        group = Group()
        for r in range(rows):
            y = self.margin + r * cell_h
            c = 0
            while c < cols:
                value = bool(grid[r, c])
                end = c
                while end < cols and bool(grid[r, end]) == value:
                    end += 1
                color = self.inlier_color if value else self.outlier_color
                group.add(
                    Rect(
                        self.margin + c * cell_w,
                        y,
                        (end - c) * cell_w,
                        cell_h,
                        fillColor=color,
                        strokeColor=None,
                        strokeWidth=0,
                    )
                )
                c = end
        return group

    def _draw_points(self, points: ProcessWindow, spec: SpecLimits, scale: float) -> Group:
        group = Group()
        for x, y in points.observations[:, :2]:
            group.add(
                Circle(
                    self.margin + (x - spec.lsl[0]) * scale,
                    self.margin + (y - spec.lsl[1]) * scale,
                    1.5,
                    fillColor=None,
                    strokeColor=self.point_color,
                    strokeWidth=0.5,
                )
            )
        return group

    def _draw_spec_box(self, plot_w: float, plot_h: float) -> Rect:
        return Rect(
            self.margin,
            self.margin,
            plot_w,
            plot_h,
            fillColor=None,
            strokeColor=self.spec_color,
            strokeWidth=2,
        )

    def _draw_labels(
        self, drawing: Drawing, spec: SpecLimits, plot_w: float, plot_h: float, title: str
    ) -> None:
        font = "Helvetica"
        bottom = self.margin - 14
        drawing.add(String(self.margin, bottom, f"{spec.lsl[0]:g}", fontName=font, fontSize=9))
        drawing.add(
            String(self.margin + plot_w, bottom, f"{spec.usl[0]:g}", fontName=font, fontSize=9, textAnchor="end")
        )
        drawing.add(
            String(self.margin + plot_w / 2, bottom, spec.names[0], fontName=font, fontSize=10, textAnchor="middle")
        )
        drawing.add(String(4, self.margin, f"{spec.lsl[1]:g}", fontName=font, fontSize=9))
        drawing.add(String(4, self.margin + plot_h - 9, f"{spec.usl[1]:g}", fontName=font, fontSize=9))
        drawing.add(String(4, self.margin + plot_h / 2, spec.names[1], fontName=font, fontSize=10))
        if title:
            drawing.add(
                String(
                    self.margin + plot_w / 2,
                    self.margin + plot_h + 12,
                    title,
                    fontName="Helvetica-Bold",
                    fontSize=12,
                    textAnchor="middle",
                )
            )


def render_region_plot(
    model: SvddModel,
    spec: SpecLimits,
    resolution: int | None = None,
    points: ProcessWindow | None = None,
    title: str = "",
) -> tuple[str, np.ndarray]:
    """Score the grid and render it; returns the SVG text and the grid."""
    grid = score_grid(model, spec, resolution)
    logger.info(
        f"Region plot: {grid.shape[0]}x{grid.shape[1]} cells, "
        f"inlier fraction {inlier_fraction(grid):.4f}, {component_count(grid)} component(s)"
    )
    return region_plot_renderer.render(grid, spec, points, title), grid


# Global renderer instance
region_plot_renderer = RegionPlotRenderer()
