"""
Serviço de simulação - Execução híbrida em malha fechada por N passos.

Cada passo parte da seção, aplica o impulso do ICPM (ou nenhum), percorre o
balanço, o impacto e a troca de pernas e volta à seção. O registro por passo e
a trajetória amostrada alimentam os arquivos CSV.
"""
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from marcha_app.core.constantes import ModoImpulso
from marcha_app.core.excecoes import FalhaPasso
from marcha_app.core.utilitarios import registrar_evento
from marcha_app.dominio import (
    ContextoMarcha,
    ControladorIcpm,
    Estado,
    RegistroPasso,
    RegistroTrajetoria,
    ResultadoMarcha,
    ResultadoPasso,
    TrechoBalanco,
)
from marcha_app.services.servico_icpm import ServicoIcpm
from marcha_app.services.servico_modelo import ServicoModelo
from marcha_app.services.servico_passo import ServicoPasso
from marcha_app.services.servico_vhc import ServicoVhc

logger = logging.getLogger(__name__)

PASSOS_RESUMO = 5


class ServicoSimulacao:
    """Serviço para execução de passos e marchas completas."""

    @staticmethod
    def executar_passo(
        contexto: ContextoMarcha,
        ponto_fixo: np.ndarray,
        estado: Estado,
        controlador: Optional[ControladorIcpm] = None,
        modo: ModoImpulso = ModoImpulso.IDEAL,
        k: int = 0,
        tempo_inicial: float = 0.0
    ) -> Tuple[RegistroPasso, ResultadoPasso]:
        """
        Executa um passo a partir de um estado na seção.

        Args:
            contexto: Modelo, marcha, ganhos, seção e tolerâncias
            ponto_fixo: z* usado no cálculo do erro
            estado: Estado na seção
            controlador: Controlador ICPM; None aplica impulso nulo
            modo: Realização do impulso
            k: Índice do passo
            tempo_inicial: Instante inicial (s)

        Returns:
            (RegistroPasso, ResultadoPasso); o estado do próximo passo é resultado.estado_final

        Raises:
            FalhaPasso: Se o passo não puder ser completado
        """
        z = ServicoIcpm.secao_de_estado(estado)
        norma_erro = float(np.linalg.norm(ServicoIcpm.erro_secao(z, ponto_fixo)))
        if controlador is not None:
            impulso = ServicoIcpm.realimentacao_impulso(controlador, z)
        else:
            impulso = np.zeros(contexto.bipede.n - 1)

        resultado = ServicoPasso.percorrer_passo(contexto, estado, impulso, modo, tempo_inicial)

        bipede = contexto.bipede
        impacto = resultado.impacto
        registro = RegistroPasso(
            k=k,
            z=z,
            impulso=impulso,
            norma_erro=norma_erro,
            duracao=resultado.duracao,
            estado_toque=resultado.estado_toque,
            impulso_solo=impacto.impulso_solo,
            energia_antes=ServicoModelo.energia_total(bipede, resultado.estado_toque),
            energia_depois=ServicoModelo.energia_total(bipede, resultado.estado_reetiquetado),
            energia_cinetica_antes=impacto.energia_cinetica_antes,
            energia_cinetica_depois=impacto.energia_cinetica_depois,
            classificacao=resultado.guarda.classificacao,
            comprimento_passo=resultado.comprimento_passo,
        )
        registrar_evento(
            "info",
            f"Passo {k}: duração {registro.duracao:.4f} s, ||e|| = {norma_erro:.3e}",
            logger,
            impulso=impulso,
            impulso_solo=impacto.impulso_solo,
            classificacao=registro.classificacao.value
        )
        return registro, resultado

    @staticmethod
    def executar_marcha(
        contexto: ContextoMarcha,
        ponto_fixo: np.ndarray,
        estado_inicial: Estado,
        numero_passos: int,
        controlador: Optional[ControladorIcpm] = None,
        modo: ModoImpulso = ModoImpulso.IDEAL
    ) -> ResultadoMarcha:
        """
        Executa N passos consecutivos.

        Uma falha após o primeiro passo encerra a execução com resultado parcial anotado.

        Raises:
            FalhaPasso: Se o primeiro passo falhar (execução rejeitada)
        """
        registros: List[RegistroPasso] = []
        trechos: List[TrechoBalanco] = []
        estado = estado_inicial
        tempo = 0.0
        falha = None

        for k in range(numero_passos):
            try:
                registro, resultado = ServicoSimulacao.executar_passo(
                    contexto, ponto_fixo, estado, controlador, modo, k, tempo
                )
            except FalhaPasso as e:
                if k == 0:
                    registrar_evento("error", "Execução rejeitada: falha no primeiro passo", logger, motivo=e.motivo.value)
                    raise
                registrar_evento("warning", f"Execução interrompida no passo {k}: {e}", logger)
                falha = f"passo {k}: {e}"
                break
            registros.append(registro)
            trechos.extend(resultado.trechos)
            estado = resultado.estado_final
            tempo += resultado.duracao

        trajetoria = ServicoSimulacao.amostrar_trajetoria(contexto, trechos)
        return ResultadoMarcha(registros=registros, trajetoria=trajetoria, falha=falha)

    @staticmethod
    def amostrar_trajetoria(contexto: ContextoMarcha, trechos: List[TrechoBalanco]) -> RegistroTrajetoria:
        """
        Amostra os trechos numa grade global de passo fixo.

        Um instante na fronteira entre trechos pertence ao trecho seguinte.
        """
        bipede = contexto.bipede
        n = bipede.n
        intervalo = contexto.simulacao.intervalo_amostragem
        tempos, colunas = [], []
        for trecho in trechos:
            inicio, fim = float(trecho.tempos[0]), trecho.tempo_final
            if fim <= inicio:
                continue
            grade = intervalo * np.arange(np.ceil(inicio / intervalo - 1e-9), np.ceil(fim / intervalo - 1e-9))
            grade = grade[(grade >= inicio) & (grade < fim)]
            if grade.size:
                tempos.append(grade)
                colunas.append(trecho.amostrar(grade))
        if trechos:
            ultimo = trechos[-1]
            tempos.append(np.array([ultimo.tempo_final]))
            colunas.append(ultimo.estado_final.como_vetor()[:, None])

        if not tempos:
            vazio = np.zeros((0, n))
            return RegistroTrajetoria(
                tempos=np.zeros(0), theta=vazio, q=vazio, dq=vazio,
                rho=np.zeros((0, n - 1)), drho=np.zeros((0, n - 1)), energia=np.zeros(0)
            )

        todos_tempos = np.concatenate(tempos)
        estados = np.concatenate(colunas, axis=1).T
        theta, rho, drho, energia = [], [], [], []
        for x in estados:
            estado = Estado.de_vetor(x)
            theta.append(bipede.matriz_transformacao @ estado.q)
            residuo, dresiduo = ServicoVhc.residuo_variedade(contexto.marcha, estado)
            rho.append(residuo)
            drho.append(dresiduo)
            energia.append(ServicoModelo.energia_total(bipede, estado))
        return RegistroTrajetoria(
            tempos=todos_tempos,
            theta=np.array(theta),
            q=estados[:, :n],
            dq=estados[:, n:],
            rho=np.array(rho),
            drho=np.array(drho),
            energia=np.array(energia),
        )

    @staticmethod
    def perturbar_ponto_fixo(
        contexto: ContextoMarcha,
        ponto_fixo: np.ndarray,
        perturbacao: float,
        semente: int
    ) -> Estado:
        """
        Estado inicial na seção deslocado de z* por um vetor aleatório de norma dada.

        A direção vem de numpy.random.default_rng(semente), então a execução é reprodutível.
        """
        gerador = np.random.default_rng(semente)
        direcao = gerador.normal(size=ponto_fixo.size)
        z = ponto_fixo + perturbacao * direcao / np.linalg.norm(direcao)
        return ServicoIcpm.estado_de_secao(contexto.secao, z)

    @staticmethod
    def resumir(resultado: ResultadoMarcha) -> Dict[str, object]:
        """
        Métricas da execução.

        Returns:
            Dicionário com período, comprimento e velocidade médios, erro final e
            impulsos máximos nos últimos passos
        """
        registros = resultado.registros
        if not registros:
            return {'passos': 0, 'falha': resultado.falha}
        ultimos = registros[-PASSOS_RESUMO:]
        periodo = float(np.mean([registro.duracao for registro in registros]))
        comprimento = float(np.mean([registro.comprimento_passo for registro in registros]))
        return {
            'passos': len(registros),
            'tempo_total': resultado.tempo_total,
            'periodo_medio': periodo,
            'comprimento_medio': comprimento,
            'velocidade_media': comprimento / periodo,
            'norma_erro_final': registros[-1].norma_erro,
            'impulso_maximo_final': float(max(np.linalg.norm(registro.impulso) for registro in ultimos)),
            'impulso_solo_maximo_final': float(max(np.linalg.norm(registro.impulso_solo) for registro in ultimos)),
            'falha': resultado.falha,
        }
