# CLI-Kommandos (je Modul ein Unterbefehl von gradshift.py)
