export { FIGURE_KINDS, FigureKind, RenderResult, SkipFigure, renderFigures } from "./figures.js";
export { RunDir, Table, column, discoverRuns, latestRun, readCsv, readJson } from "./data.js";
export { Series, barChart, lineChart } from "./svg.js";
export { main } from "./cli.js";
