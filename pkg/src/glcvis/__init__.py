"""glcvis: lossless n-D to 2-D graph visualization and visual knowledge discovery.

Subsystems: dataset ingestion (`dataset`), paired coordinate encoders
(`coords`), the stacked-vector linear classifier (`glcl`), interpretable
rules and rectangle-rule search (`rules`), distance-preservation bounds
(`jl`), order-encoded cell images (`cpcr`), deterministic SVG rendering
(`render`), and the CLI/HTTP surfaces (`cli`, `server`).
"""

__version__ = "0.1.0"
