# Fachlogik: Zustände, r-Gates, Kostenfunktionen, Gradientenregeln, Gegenbeispiel, Hesse-Matrix.
