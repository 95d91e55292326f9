# Hilfsmodule: Fehler, Einstellungen, Zufallsströme.
